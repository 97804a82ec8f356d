#include <doctest.h>

#include "lpra/oracle.hpp"
#include "lpra/rng.hpp"
#include "lpra/simplex.hpp"

using namespace lpra;

TEST_CASE("simplex solves a known LP") {
  // min -x - y  s.t.  x + y + s1 = 4, x + 3y + s2 = 6, all >= 0.
  Matrix a(2, 4);
  a << 1, 1, 1, 0,
       1, 3, 0, 1;
  Vector b(2);
  b << 4, 6;
  Vector c(4);
  c << -1, -1, 0, 0;
  LpSolution sol = simplex_solve(a, b, c);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(-4.0));
}

TEST_CASE("simplex detects infeasibility") {
  // x + s = 1 and x - s2 = 3 with x <= 1 forced: infeasible.
  Matrix a(2, 3);
  a << 1, 1, 0,
       1, 0, -1;
  Vector b(2);
  b << 1, 3;
  Vector c(3);
  c << 1, 0, 0;
  LpSolution sol = simplex_solve(a, b, c);
  CHECK(sol.status == LpStatus::kInfeasible);
}

TEST_CASE("simplex detects unboundedness") {
  // min -x s.t. x - s = 0: x can grow without bound.
  Matrix a(1, 2);
  a << 1, -1;
  Vector b(1);
  b << 0;
  Vector c(2);
  c << -1, 0;
  LpSolution sol = simplex_solve(a, b, c);
  CHECK(sol.status == LpStatus::kUnbounded);
}

TEST_CASE("l1 regression matches breakpoint oracle in 1-d") {
  // For a one-column design of ones, the l1 optimum is attained at one of
  // the data points; scan them all as the oracle.
  SeededRng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 9;
    Matrix u = Matrix::Ones(n, 1);
    Vector b(n);
    for (int i = 0; i < n; ++i) b(i) = 10.0 * (rng.uniform() - 0.5);
    L1FitResult fit = l1_regression_exact(u, b);
    double oracle = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      oracle = std::min(oracle, (b.array() - b(i)).abs().sum());
    }
    CHECK(fit.residual_l1 == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("l1 regression on random overdetermined systems beats least squares") {
  SeededRng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix u = gaussian_matrix(12, 3, rng);
    Vector b = gaussian_matrix(12, 1, rng).col(0);
    L1FitResult fit = l1_regression_exact(u, b);
    Vector ls = u.colPivHouseholderQr().solve(b);
    const double ls_l1 = (u * ls - b).cwiseAbs().sum();
    CHECK(fit.residual_l1 <= ls_l1 + 1e-9);
  }
}

TEST_CASE("degenerate all-zero design") {
  Matrix u = Matrix::Zero(4, 2);
  Vector b(4);
  b << 1, -2, 3, -4;
  L1FitResult fit = l1_regression_exact(u, b);
  CHECK(fit.residual_l1 == doctest::Approx(10.0));
}
