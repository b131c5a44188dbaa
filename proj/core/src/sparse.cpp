#include "stresspath/sparse.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>

namespace stresspath {

SparseMatrix::SparseMatrix(int rows, int cols,
                           const std::vector<Eigen::Triplet<double>>& triplets, bool symmetric)
    : mat_(rows, cols), symmetric_(symmetric) {
  mat_.setFromTriplets(triplets.begin(), triplets.end());
  check(symmetric);
}

SparseMatrix::SparseMatrix(Eigen::SparseMatrix<double> m, bool symmetric)
    : mat_(std::move(m)), symmetric_(symmetric) {
  mat_.makeCompressed();
  check(symmetric);
}

void SparseMatrix::check(bool symmetric) {
  double max_abs = 0.0;
  for (int k = 0; k < mat_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mat_, k); it; ++it) {
      if (!std::isfinite(it.value()))
        throw ValidationError("sparse matrix has a non-finite entry at (" +
                              std::to_string(it.row()) + ", " + std::to_string(it.col()) + ")");
      max_abs = std::max(max_abs, std::abs(it.value()));
    }
  if (symmetric) {
    if (mat_.rows() != mat_.cols())
      throw ValidationError("matrix flagged symmetric is not square");
    Eigen::SparseMatrix<double> diff = mat_ - Eigen::SparseMatrix<double>(mat_.transpose());
    double max_diff = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
        max_diff = std::max(max_diff, std::abs(it.value()));
    if (max_diff > 1e-10 * std::max(max_abs, 1e-300))
      throw ValidationError("matrix flagged symmetric fails the symmetry check (asymmetry " +
                            std::to_string(max_diff) + ")");
  }
}

namespace {

Eigen::VectorXd cg_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                         double tol, int max_iter) {
  const Eigen::Index n = A.rows();
  Eigen::VectorXd inv_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = A.coeff(i, i);
    inv_diag[i] = d > 0.0 ? 1.0 / d : 1.0;
  }

  const double b_norm = b.norm();
  if (b_norm == 0.0) return Eigen::VectorXd::Zero(n);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  double achieved = r.norm() / b_norm;

  for (int it = 0; it < max_iter; ++it) {
    if (achieved <= tol) return x;
    Eigen::VectorXd Ap = A * p;
    double pAp = p.dot(Ap);
    if (pAp <= 0.0 || !std::isfinite(pAp))
      throw ComputeError("conjugate gradient hit a non-positive curvature direction; "
                         "matrix is not positive definite (residual " +
                         std::to_string(achieved) + ")");
    double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    // Recompute the residual from scratch periodically to cancel drift.
    if ((it + 1) % 64 == 0) r = b - A * x;
    achieved = r.norm() / b_norm;
    z = inv_diag.cwiseProduct(r);
    double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  // True residual decides; the recurrence may be stale.
  achieved = (b - A * x).norm() / b_norm;
  if (achieved <= tol) return x;
  std::ostringstream os;
  os << "conjugate gradient did not converge in " << max_iter
     << " iterations (achieved relative residual " << achieved << ", requested " << tol << ")";
  throw ComputeError(os.str());
}

}  // namespace

Eigen::VectorXd solve_spd(const SparseMatrix& A, const Eigen::VectorXd& b,
                          const SolveOptions& opts) {
  if (A.rows() != A.cols())
    throw ValidationError("solve_spd requires a square matrix, got " + std::to_string(A.rows()) +
                          "x" + std::to_string(A.cols()));
  if (b.size() != A.rows())
    throw ValidationError("dimension mismatch: matrix is " + std::to_string(A.rows()) +
                          "x" + std::to_string(A.cols()) + ", rhs has length " +
                          std::to_string(b.size()));

  if (opts.method == SolveOptions::Method::direct) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A.eigen());
    if (ldlt.info() != Eigen::Success)
      throw ComputeError("sparse LDLT factorization failed (singular system?)");
    Eigen::VectorXd x = ldlt.solve(b);
    double b_norm = b.norm();
    double res = b_norm > 0 ? (b - A * x).norm() / b_norm : 0.0;
    if (!std::isfinite(res) || res > std::max(opts.tol, 1e-8))
      throw ComputeError("direct solve residual " + std::to_string(res) +
                         " exceeds tolerance (singular or ill-conditioned system)");
    return x;
  }

  int max_iter = opts.max_iterations > 0 ? opts.max_iterations
                                         : 20 * static_cast<int>(A.rows()) + 200;
  return cg_solve(A.eigen(), b, opts.tol, max_iter);
}

Eigen::VectorXd solve_regularized_ls(const SparseMatrix& G, const Eigen::VectorXd& target,
                                     double eps, const SolveOptions& opts) {
  if (target.size() != G.rows())
    throw ValidationError("target length " + std::to_string(target.size()) +
                          " does not match row count " + std::to_string(G.rows()));
  if (eps < 0.0) throw ValidationError("regularizer eps must be >= 0");

  Eigen::SparseMatrix<double> gtg = Eigen::SparseMatrix<double>(G.eigen().transpose()) * G.eigen();
  if (eps > 0.0) {
    Eigen::SparseMatrix<double> identity(G.cols(), G.cols());
    identity.setIdentity();
    gtg += eps * identity;
  }
  Eigen::VectorXd rhs = G.eigen().transpose() * target;
  return solve_spd(SparseMatrix(std::move(gtg), true), rhs, opts);
}

}  // namespace stresspath
