#include <doctest.h>

#include <cmath>

#include "lpra/oracle.hpp"
#include "lpra/rng.hpp"
#include "lpra/sketch.hpp"
#include "lpra/solvers.hpp"

using namespace lpra;

TEST_CASE("lp_regression identity design") {
  Matrix u = Matrix::Identity(3, 3);
  Vector b(3);
  b << 1, 2, 3;
  for (double p : {1.0, 1.5, 2.0}) {
    RegressionResult r = lp_regression(u, b, p);
    CHECK((r.coefficients - b).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(r.residual_p <= 1e-9);
  }
}

TEST_CASE("lp_regression 1-d medians and means") {
  Matrix ones = Matrix::Ones(3, 1);
  Vector b(3);
  b << 0, 1, 10;

  // l1 optimum of a location fit is a median: oracle scans the breakpoints.
  RegressionResult l1 = lp_regression(ones, b, 1.0);
  double oracle = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) oracle = std::min(oracle, (b.array() - b(i)).abs().sum());
  CHECK(oracle == doctest::Approx(10.0));
  CHECK(l1.coefficients(0) == doctest::Approx(1.0));
  CHECK(l1.residual_p == doctest::Approx(10.0));

  RegressionResult l2 = lp_regression(ones, b, 2.0);
  CHECK(l2.coefficients(0) == doctest::Approx(11.0 / 3.0));
}

TEST_CASE("lp_regression residual beats least squares in lp") {
  SeededRng rng(101);
  for (int t = 0; t < 200; ++t) {
    const double p = (t % 4 == 0) ? 1.0 : 1.0 + rng.uniform();
    Matrix u = gaussian_matrix(10, 3, rng);
    Vector b = gaussian_matrix(10, 1, rng).col(0);
    RegressionResult r = lp_regression(u, b, p);
    Vector ls = u.colPivHouseholderQr().solve(b);
    Vector ls_res = u * ls - b;
    CHECK(r.residual_p <= lp_norm(ls_res, p) + 1e-9);
    // Recorded residual matches an independent recomputation.
    Vector res = u * r.coefficients - b;
    CHECK(r.residual_p == doctest::Approx(lp_norm(res, p)).epsilon(1e-7));
  }
}

TEST_CASE("multi_response_regression") {
  SeededRng rng(7);
  Matrix u = gaussian_matrix(6, 3, rng);

  MultiRegressionResult self = multi_response_regression(u, u, 1.0);
  CHECK((self.x - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(self.costs.maxCoeff() <= 1e-8);

  // A column orthogonal to span(U) keeps its full l2 norm as the cost.
  Matrix g = gaussian_matrix(6, 1, rng);
  Matrix proj = u * (u.transpose() * u).ldlt().solve(u.transpose() * g);
  Matrix perp = g - proj;
  MultiRegressionResult fit = multi_response_regression(u, perp, 2.0);
  CHECK(fit.costs(0) == doctest::Approx(perp.norm()).epsilon(1e-8));

  // Zero-column design: costs are the plain column norms.
  Matrix empty(6, 0);
  Matrix b = gaussian_matrix(6, 2, rng);
  MultiRegressionResult none = multi_response_regression(empty, b, 1.0);
  Vector c0 = b.col(0), c1 = b.col(1);
  CHECK(none.costs(0) == doctest::Approx(lp_norm(c0, 1.0)));
  CHECK(none.costs(1) == doctest::Approx(lp_norm(c1, 1.0)));
}

namespace {

// 1-d oracle for the median-constrained solve: with a single unknown every
// subset constraint is an interval, so the feasible set per subset is an
// interval intersection and the best norm is the point closest to zero.
double one_dim_min_norm_oracle(const Vector& m, const Vector& s, double cb) {
  const Index r = m.size();
  const int h = static_cast<int>((r + 1) / 2);
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << r); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != h) continue;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool feasible = true;
    for (Index j = 0; j < r; ++j) {
      if (!(mask >> j & 1)) continue;
      if (m(j) == 0.0) {
        if (std::abs(s(j)) > cb) feasible = false;
        continue;
      }
      double a = (s(j) - cb) / m(j);
      double b = (s(j) + cb) / m(j);
      if (a > b) std::swap(a, b);
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    }
    if (!feasible || lo > hi) continue;
    double v = 0.0;
    if (lo > 0.0) v = lo;
    if (hi < 0.0) v = hi;
    best = std::min(best, std::abs(v));
  }
  return best;
}

}  // namespace

TEST_CASE("min_norm_with_median_constraint basics") {
  const double medp1 = med_p(1.0).value;
  SeededRng rng(9);

  SUBCASE("zero target gives zero solution") {
    Matrix m = gaussian_matrix(5, 2, rng);
    Vector s = Vector::Zero(5);
    auto sol = min_norm_with_median_constraint(m, s, 0.5, 1.0, medp1);
    REQUIRE(sol.has_value());
    CHECK(sol->norm_p == 0.0);
  }

  SUBCASE("two-coordinate identity example") {
    Matrix m = Matrix::Identity(2, 2);
    Vector s(2);
    s << 5, 5;
    auto sol = min_norm_with_median_constraint(m, s, 0.0, 1.0, medp1);
    REQUIRE(sol.has_value());
    CHECK(sol->norm_p == doctest::Approx(5.0).epsilon(1e-8));
  }

  SUBCASE("vacuous constraint") {
    Matrix m = gaussian_matrix(4, 2, rng);
    Vector s(4);
    s << 1, -2, 3, -4;
    const double c = s.cwiseAbs().maxCoeff() / medp1 + 1.0;
    auto sol = min_norm_with_median_constraint(m, s, c, 1.0, medp1);
    REQUIRE(sol.has_value());
    CHECK(sol->norm_p == 0.0);
  }

  SUBCASE("infeasible when nothing can move the residual") {
    Matrix m = Matrix::Zero(3, 1);
    Vector s(3);
    s << 5, 6, 7;
    auto sol = min_norm_with_median_constraint(m, s, 1.0, 1.0, medp1);
    CHECK(!sol.has_value());
  }

  SUBCASE("subset cap enforced") {
    Matrix m = Matrix::Zero(15, 1);
    Vector s = Vector::Ones(15);
    CHECK_THROWS_AS(min_norm_with_median_constraint(m, s, 1.0, 1.0, medp1),
                    BudgetExceeded);
  }
}

TEST_CASE("min_norm_with_median_constraint against 1-d enumeration oracle") {
  SeededRng rng(77);
  const double medp1 = med_p(1.0).value;
  for (int t = 0; t < 40; ++t) {
    const Index r = 5;
    Matrix m = gaussian_matrix(r, 1, rng);
    Vector s = 3.0 * gaussian_matrix(r, 1, rng).col(0);
    const double c = 0.3 + rng.uniform();
    auto sol = min_norm_with_median_constraint(m, s, c, 1.0, medp1);
    const double oracle = one_dim_min_norm_oracle(m.col(0), s, c * medp1);
    if (std::isinf(oracle)) {
      CHECK(!sol.has_value());
    } else {
      REQUIRE(sol.has_value());
      CHECK(sol->norm_p == doctest::Approx(oracle).epsilon(1e-7));
      CHECK(sol->med_over_medp <= c * (1.0 + 1e-7) + 1e-9);
    }
  }
}

TEST_CASE("min_norm constraint holds on recheck and is monotone in c") {
  SeededRng rng(123);
  for (double p : {1.0, 1.5}) {
    const double mp = med_p(p).value;
    for (int inst = 0; inst < 5; ++inst) {
      Matrix m = gaussian_matrix(7, 2, rng);
      Vector s = 2.0 * gaussian_matrix(7, 1, rng).col(0);
      double prev_norm = std::numeric_limits<double>::infinity();
      for (double c : {0.05, 0.2, 0.5, 1.0, 2.0, 5.0}) {
        auto sol = min_norm_with_median_constraint(m, s, c, p, mp);
        if (!sol.has_value()) continue;
        Vector res = m * sol->v - s;
        CHECK(median_abs(res) / mp <= c * (1.0 + 1e-6) + 1e-9);
        CHECK(sol->norm_p <= prev_norm * (1.0 + 1e-6) + 1e-9);
        prev_norm = sol->norm_p;
      }
    }
  }
}

TEST_CASE("best_left_factor") {
  SeededRng rng(55);

  SUBCASE("exact recovery with padded identity right factor") {
    const Index k = 2, d = 6, n = 5;
    Matrix v = Matrix::Zero(k, d);
    v.leftCols(k) = Matrix::Identity(k, k);
    v.rightCols(d - k) = gaussian_matrix(k, d - k, rng);
    Matrix u_star = gaussian_matrix(n, k, rng);
    Matrix a = u_star * v;
    for (double p : {1.0, 1.5, 2.0}) {
      Matrix u = best_left_factor(v, a, p);
      CHECK(entrywise_norm(u * v - a, p) <= 1e-7 * entrywise_norm(a, p));
    }
  }

  SUBCASE("zero right factor returns the zero convention") {
    Matrix v = Matrix::Zero(2, 4);
    Matrix a = gaussian_matrix(3, 4, rng);
    Matrix u = best_left_factor(v, a, 1.0);
    CHECK(u.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("identity constraint basis matches the unconstrained call") {
    Matrix v = gaussian_matrix(2, 5, rng);
    Matrix a = gaussian_matrix(4, 5, rng);
    Matrix u_free = best_left_factor(v, a, 1.0);
    Matrix u_constrained = best_left_factor(v, a, 1.0, Matrix(Matrix::Identity(4, 4)));
    CHECK((u_free - u_constrained).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("constrained output columns stay in span of the basis") {
    const Index n = 8, t = 3;
    Matrix basis = gaussian_matrix(n, t, rng);
    Matrix v = gaussian_matrix(2, 6, rng);
    Matrix a = gaussian_matrix(n, 6, rng);
    for (double p : {1.0, 1.6}) {
      Matrix u = best_left_factor(v, a, p, basis);
      Eigen::ColPivHouseholderQR<Matrix> qr(basis);
      Matrix q = qr.householderQ() * Matrix::Identity(n, t);
      Matrix res = u - q * (q.transpose() * u);
      CHECK(res.cwiseAbs().maxCoeff() < 1e-8);
      // The constrained fit can only do worse than the unconstrained one.
      Matrix u_free = best_left_factor(v, a, p);
      CHECK(entrywise_norm(u * v - a, p) >= entrywise_norm(u_free * v - a, p) - 1e-7);
    }
  }
}
