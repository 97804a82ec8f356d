#include <doctest.h>

#include <cmath>

#include "lpra/fpt.hpp"
#include "lpra/oracle.hpp"
#include "lpra/rng.hpp"
#include "lpra/solvers.hpp"

using namespace lpra;

TEST_CASE("guess grid rounding error bound") {
  GuessGrid g = make_guess_grid(100.0, 2, 0.25, 8.0);
  CHECK(g.ratio > 1.0);
  CHECK(g.min_mag < g.max_mag);
  CHECK(g.round_to_grid(0.0) == 0.0);

  SeededRng rng(501);
  for (int t = 0; t < 1000; ++t) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double mag =
        g.min_mag * std::pow(g.max_mag / g.min_mag, rng.uniform());
    const double x = sign * mag;
    const double r = g.round_to_grid(x);
    CHECK(std::abs(x - r) <= (g.ratio - 1.0) * std::abs(x) * (1.0 + 1e-12));
    CHECK(std::copysign(1.0, r) == sign);
  }
  // Below the cutoff, entries vanish.
  CHECK(g.round_to_grid(g.min_mag * 1e-8) == 0.0);
}

TEST_CASE("enumeration values are odd-sized exact grid powers") {
  GuessGrid g = make_guess_grid(10.0, 1, 0.4, 4.0);
  std::vector<double> vals = g.enumeration_values(7);
  CHECK(vals.size() <= 7);
  CHECK(vals[0] == 0.0);
  const double log_ratio = std::log(g.ratio);
  for (std::size_t i = 1; i < vals.size(); ++i) {
    const double t = std::log(std::abs(vals[i])) / log_ratio;
    CHECK(std::abs(t - std::round(t)) < 1e-6);
    CHECK(std::abs(vals[i]) >= g.min_mag * (1.0 - 1e-9));
    CHECK(std::abs(vals[i]) <= g.max_mag * (1.0 + 1e-9));
  }
}

TEST_CASE("cost bound grid is an exact geometric sequence") {
  CostBoundGrid grid = make_cost_bound_grid(50.0, 20, 0.25, 8.0, 1.0);
  REQUIRE(grid.values.size() >= 3);
  for (std::size_t i = 1; i < grid.values.size(); ++i) {
    CHECK(grid.values[i] / grid.values[i - 1] == doctest::Approx(1.25).epsilon(1e-12));
  }
  CHECK(grid.values.front() ==
        doctest::Approx((0.25 * 0.25 / 8.0) * 50.0 / 20.0).epsilon(1e-12));
  CHECK(grid.values.back() >= 2.0 * 50.0);
}

TEST_CASE("cost bound LP examples") {
  SUBCASE("single column, single bound, feasible") {
    Matrix costs(1, 1), norms(1, 1);
    costs << 2.0;
    norms << 0.5;
    ColumnLpSolution lp = build_cost_bound_lp(costs, norms, 10.0, 1.0, 1.0);
    REQUIRE(lp.feasible);
    CHECK(lp.x(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("delta below every achievable cost is infeasible") {
    Matrix costs(1, 2), norms(1, 2);
    costs << 2.0, 3.0;
    norms << 0.1, 0.1;
    ColumnLpSolution lp = build_cost_bound_lp(costs, norms, 1.0, 10.0, 1.0);
    CHECK(!lp.feasible);
  }

  SUBCASE("mixture instance returns a fractional feasible point") {
    // One column, two bounds: norm forces x0 <= 1/2, cost forces x1 <= 0.6.
    Matrix costs(1, 2), norms(1, 2);
    costs << 0.0, 2.0;
    norms << 2.0, 0.0;
    ColumnLpSolution lp = build_cost_bound_lp(costs, norms, 1.2, 1.0, 1.0);
    REQUIRE(lp.feasible);
    const double x0 = lp.x(0, 0), x1 = lp.x(0, 1);
    CHECK(x0 + x1 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(x0 >= 0.4 - 1e-8);
    CHECK(x0 <= 0.5 + 1e-8);
    // Re-check constraints independently.
    CHECK(2.0 * x0 <= 1.0 + 1e-8);
    CHECK(2.0 * x1 <= 1.2 + 1e-8);
  }

  SUBCASE("NaN marks unavailable pairs; a fully unavailable column is infeasible") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Matrix costs(2, 2), norms(2, 2);
    costs << 1.0, nan, nan, nan;
    norms << 0.1, nan, nan, nan;
    ColumnLpSolution lp = build_cost_bound_lp(costs, norms, 10.0, 10.0, 1.0);
    CHECK(!lp.feasible);
  }
}

TEST_CASE("rounded right factor sampling") {
  const MedPConstant mp = med_p(1.0);
  SeededRng rng(502);

  // Deterministic 0/1 LP weights reproduce the deterministic assembly.
  ColumnLpSolution lp;
  lp.feasible = true;
  lp.x = Matrix::Zero(2, 2);
  lp.x(0, 1) = 1.0;
  lp.x(1, 0) = 1.0;
  std::vector<std::vector<Vector>> catalog(2, std::vector<Vector>(2));
  for (int i = 0; i < 2; ++i) {
    for (int c = 0; c < 2; ++c) {
      catalog[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
          Vector::Constant(1, 10.0 * i + c);
    }
  }
  Matrix guess = Matrix::Ones(3, 1);
  Matrix sa = Matrix::Zero(3, 2);
  RoundedFactorDraw draw = sample_rounded_right_factor(lp, catalog, guess, sa, mp, 1.0,
                                                       1e9, 1e9, 3, rng);
  CHECK(draw.accepted);
  CHECK(draw.draws_used == 1);
  CHECK(draw.v(0, 0) == 1.0);    // column 0 picks bound 1
  CHECK(draw.v(0, 1) == 10.0);   // column 1 picks bound 0

  // Zero trials never accepts.
  RoundedFactorDraw none = sample_rounded_right_factor(lp, catalog, guess, sa, mp, 1.0,
                                                       1e9, 1e9, 0, rng);
  CHECK(!none.accepted);
}

TEST_CASE("guessing returns exactly on inputs of rank at most k") {
  SeededRng rng(503);
  Matrix u = gaussian_matrix(12, 1, rng);
  Matrix v = gaussian_matrix(1, 9, rng);
  Matrix a = u * v;
  FptBudget budget;
  budget.sketch_rows = 3;
  SeededRng sub = rng.fork("fpt");
  FptResult res = guessing_additive_eps_approximation(a, 1, 0.25, 8.0, 0.0, 1.0, budget, sub);
  CHECK(res.exact_rank_shortcut);
  CHECK(entrywise_norm(res.factors.product() - a, 1.0) <= 1e-9 * entrywise_norm(a, 1.0));
}

TEST_CASE("micro full enumeration audits its own argmin") {
  SeededRng rng(504);
  PlantedInstance inst = planted_instance(10, 10, 1, 0.1, 1.0, rng);
  FptBudget budget;
  budget.sketch_rows = 3;
  budget.grid_values_per_entry = 5;
  SeededRng sub = rng.fork("fpt");
  const double opt_hat = svd_baseline(inst.a, 1, 1.0);
  FptResult res = guessing_additive_eps_approximation(inst.a, 1, 0.3, 4.0, opt_hat, 1.0,
                                                      budget, sub);
  CHECK(!res.budget_exhausted);
  CHECK(res.guesses_evaluated == 5 * 5 * 5);
  REQUIRE(res.any_lp_feasible);
  double best = std::numeric_limits<double>::infinity();
  for (double e : res.per_guess_errors) best = std::min(best, e);
  CHECK(res.factors.achieved_error_p == best);
}

TEST_CASE("oracle-guided pipeline fits a planted instance") {
  SeededRng rng(505);
  PlantedInstance inst = planted_instance(20, 20, 1, 0.1, 1.0, rng);
  FptBudget budget;
  budget.mode = FptBudget::Mode::kOracleGuided;
  budget.oracle_left_factor = inst.u_star;
  budget.sketch_rows = 13;
  SeededRng sub = rng.fork("fpt");
  FptResult res = guessing_additive_eps_approximation(inst.a, 1, 0.25, 8.0,
                                                      inst.noise_norm_p, 1.0, budget, sub);
  REQUIRE(res.any_lp_feasible);
  CHECK(res.factors.achieved_error_p <=
        (1.0 + 0.25) * inst.noise_norm_p + (0.25 / 8.0) * entrywise_norm(inst.a, 1.0));
}

TEST_CASE("constrained mode keeps the left factor inside the span") {
  SeededRng rng(506);
  PlantedInstance inst = planted_instance(14, 12, 1, 0.15, 1.0, rng);
  Matrix basis(14, 2);
  basis.col(0) = inst.u_star.col(0);
  basis.col(1) = gaussian_matrix(14, 1, rng).col(0);
  FptBudget budget;
  budget.mode = FptBudget::Mode::kOracleGuided;
  budget.oracle_left_factor = inst.u_star;
  budget.constraint_basis = basis;
  SeededRng sub = rng.fork("fpt");
  FptResult res = guessing_additive_eps_approximation(inst.a, 1, 0.25, 8.0,
                                                      inst.noise_norm_p, 1.0, budget, sub);
  REQUIRE(res.any_lp_feasible);
  Eigen::ColPivHouseholderQR<Matrix> qr(basis);
  Matrix q = qr.householderQ() * Matrix::Identity(14, 2);
  Matrix resid = res.factors.left - q * (q.transpose() * res.factors.left);
  CHECK(resid.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("wrapper output has rank at most 3k and a covering opt grid") {
  SeededRng rng(507);
  PlantedInstance inst = planted_instance(14, 14, 1, 0.2, 1.0, rng);
  FptBudget budget;
  budget.mode = FptBudget::Mode::kOracleGuided;  // injects the residual SVD factor
  budget.sketch_rows = 9;
  SeededRng sub = rng.fork("fpt");
  FptWrapperResult res =
      rounding_guessing_eps_approximation(inst.a, 1, 0.25, 1.0, budget, sub);
  CHECK(numerical_rank(res.factors.left) <= 3);
  CHECK(res.factors.left.cols() == 3);
  REQUIRE(!res.opt_grid.empty());
  // Grid is geometric with ratio 1+eps, descending from the svd error.
  CHECK(res.opt_grid.front() == doctest::Approx(res.svd_error));
  for (std::size_t i = 1; i < res.opt_grid.size(); ++i) {
    CHECK(res.opt_grid[i - 1] / res.opt_grid[i] == doctest::Approx(1.25).epsilon(1e-12));
  }
  // Wrapper never does worse than its initializer.
  CHECK(res.factors.achieved_error_p <= res.initializer_error + 1e-9);
}

TEST_CASE("wrapper is exact on rank-2k inputs") {
  SeededRng rng(508);
  Matrix u = gaussian_matrix(16, 2, rng);
  Matrix v = gaussian_matrix(2, 16, rng);
  Matrix a = u * v;  // rank 2 = 2k for k = 1
  FptBudget budget;
  budget.mode = FptBudget::Mode::kOracleGuided;
  budget.sketch_rows = 9;
  SeededRng sub = rng.fork("fpt");
  FptWrapperResult res = rounding_guessing_eps_approximation(a, 1, 0.25, 1.0, budget, sub);
  CHECK(res.factors.achieved_error_p <= 1e-6 * entrywise_norm(a, 1.0));
}
