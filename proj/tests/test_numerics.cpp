#include <doctest.h>

#include <Eigen/Dense>

#include "stresspath/sparse.hpp"
#include "test_support.hpp"

using namespace stresspath;

namespace {

SparseMatrix identity(int n) {
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
  return SparseMatrix(n, n, trip, true);
}

SparseMatrix random_spd(int n, std::mt19937& gen) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = unit(gen);
  Eigen::MatrixXd a = b.transpose() * b + n * Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) trip.emplace_back(i, j, a(i, j));
  return SparseMatrix(n, n, trip, true);
}

}  // namespace

TEST_CASE("solve_spd identity and hand-solved 2x2") {
  Eigen::VectorXd b(3);
  b << 1, 2, 3;
  Eigen::VectorXd x = solve_spd(identity(3), b);
  CHECK((x - b).norm() < 1e-12);

  // A = [[4,1],[1,3]], b = (1,2) -> x = (1/11, 7/11).
  std::vector<Eigen::Triplet<double>> trip = {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}};
  SparseMatrix a(2, 2, trip, true);
  Eigen::VectorXd b2(2);
  b2 << 1, 2;
  Eigen::VectorXd x2 = solve_spd(a, b2);
  CHECK(x2[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-10));
  CHECK(x2[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-10));

  CHECK(solve_spd(a, Eigen::VectorXd::Zero(2)).norm() == 0.0);
}

TEST_CASE("solve_spd meets the residual contract on 100 random SPD systems") {
  std::uniform_int_distribution<int> size(2, 200);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    int n = size(testsupport::rng());
    SparseMatrix a = random_spd(n, testsupport::rng());
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = unit(testsupport::rng());
    Eigen::VectorXd x = solve_spd(a, b);
    CHECK((a * x - b).norm() <= 1e-10 * b.norm() + 1e-300);
  }
}

TEST_CASE("solve_spd error paths") {
  std::vector<Eigen::Triplet<double>> trip = {{0, 0, 1.0}, {1, 1, 1.0}};
  SparseMatrix a(2, 2, trip, true);
  CHECK_THROWS_AS(solve_spd(a, Eigen::VectorXd::Zero(3)), ValidationError);

  // Indefinite matrix: CG must report failure rather than return garbage.
  std::vector<Eigen::Triplet<double>> indef = {{0, 0, 1.0}, {1, 1, -1.0}};
  SparseMatrix bad(2, 2, indef, true);
  Eigen::VectorXd b(2);
  b << 1, 1;
  CHECK_THROWS_AS(solve_spd(bad, b), ComputeError);

  SolveOptions tight;
  tight.max_iterations = 1;
  SparseMatrix hard = random_spd(50, testsupport::rng());
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(50);
  CHECK_THROWS_AS(solve_spd(hard, rhs, tight), ComputeError);
}

TEST_CASE("symmetry flag is verified on construction") {
  std::vector<Eigen::Triplet<double>> trip = {{0, 1, 1.0}};
  CHECK_THROWS_AS(SparseMatrix(2, 2, trip, true), ValidationError);
  CHECK_NOTHROW(SparseMatrix(2, 2, trip, false));

  std::vector<Eigen::Triplet<double>> nan_trip = {{0, 0, std::nan("")}};
  CHECK_THROWS_AS(SparseMatrix(1, 1, nan_trip, false), ValidationError);
}

TEST_CASE("solve_regularized_ls shrinkage and zero target") {
  const double eps = 0.25;
  Eigen::VectorXd t(4);
  t << 1, -2, 3, 0.5;
  Eigen::VectorXd phi = solve_regularized_ls(identity(4), t, eps);
  CHECK((phi - t / (1.0 + eps)).norm() < 1e-10);

  Eigen::VectorXd zero = solve_regularized_ls(identity(4), Eigen::VectorXd::Zero(4), eps);
  CHECK(zero.norm() == 0.0);
}

TEST_CASE("solve_regularized_ls matches a dense normal-equation oracle") {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = 30, cols = 12;
    Eigen::MatrixXd g(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) g(i, j) = unit(testsupport::rng());
    Eigen::VectorXd t(rows);
    for (int i = 0; i < rows; ++i) t[i] = unit(testsupport::rng());
    const double eps = 1e-3;

    Eigen::MatrixXd lhs = g.transpose() * g + eps * Eigen::MatrixXd::Identity(cols, cols);
    Eigen::VectorXd expected = lhs.ldlt().solve(g.transpose() * t);

    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) trip.emplace_back(i, j, g(i, j));
    Eigen::VectorXd actual = solve_regularized_ls(SparseMatrix(rows, cols, trip), t, eps);
    CHECK((actual - expected).norm() < 1e-8);
  }
}

TEST_CASE("regularized objective beats 1000 random perturbations") {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int rows = 24, cols = 10;
  Eigen::MatrixXd g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = unit(testsupport::rng());
  Eigen::VectorXd t(rows);
  for (int i = 0; i < rows; ++i) t[i] = unit(testsupport::rng());
  const double eps = 1e-2;

  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) trip.emplace_back(i, j, g(i, j));
  Eigen::VectorXd phi = solve_regularized_ls(SparseMatrix(rows, cols, trip), t, eps);

  auto objective = [&](const Eigen::VectorXd& x) {
    return (g * x - t).squaredNorm() + eps * x.squaredNorm();
  };
  const double best = objective(phi);
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd noise(cols);
    for (int j = 0; j < cols; ++j) noise[j] = 0.01 * unit(testsupport::rng());
    CHECK(objective(phi + noise) >= best - 1e-12);
  }
}
