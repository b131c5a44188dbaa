#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "stresspath/types.hpp"

namespace stresspath {

// Thin wrapper around compressed sparse storage. When constructed with
// `symmetric = true` the matrix is checked against its transpose
// (|A - A^T|_inf <= 1e-10 |A|_inf) and all entries are required finite.
class SparseMatrix {
 public:
  SparseMatrix(int rows, int cols, const std::vector<Eigen::Triplet<double>>& triplets,
               bool symmetric = false);
  explicit SparseMatrix(Eigen::SparseMatrix<double> m, bool symmetric = false);

  int rows() const { return static_cast<int>(mat_.rows()); }
  int cols() const { return static_cast<int>(mat_.cols()); }
  long nonzeros() const { return static_cast<long>(mat_.nonZeros()); }
  bool is_symmetric() const { return symmetric_; }

  const Eigen::SparseMatrix<double>& eigen() const { return mat_; }
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const { return mat_ * x; }

 private:
  void check(bool symmetric);
  Eigen::SparseMatrix<double> mat_;
  bool symmetric_ = false;
};

struct SolveOptions {
  double tol = 1e-10;      // relative residual |Ax-b| / |b|
  int max_iterations = 0;  // 0 = 20n + 200
  enum class Method { cg, direct } method = Method::cg;
};

// Solve Ax = b for symmetric positive (semi-)definite A. The baseline is a
// Jacobi-preconditioned conjugate gradient converged on the true residual;
// Method::direct switches to a sparse LDLT factorization (still verified
// against the residual contract). Deterministic for fixed inputs.
Eigen::VectorXd solve_spd(const SparseMatrix& A, const Eigen::VectorXd& b,
                          const SolveOptions& opts = {});

// argmin |G phi - target|^2 + eps |phi|^2 via the normal equations
// (G^T G + eps I) phi = G^T target. `eps` is absolute and must be > 0 for
// rank-deficient G.
Eigen::VectorXd solve_regularized_ls(const SparseMatrix& G, const Eigen::VectorXd& target,
                                     double eps, const SolveOptions& opts = {});

}  // namespace stresspath
