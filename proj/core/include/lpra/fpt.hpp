#pragma once

#include <optional>
#include <vector>

#include "lpra/matrix.hpp"
#include "lpra/rankreduce.hpp"
#include "lpra/rng.hpp"
#include "lpra/sketch.hpp"

namespace lpra {

/// The multiplicative discretization of sketched-left-factor entries:
/// {0} union {+/- ratio^t : min_mag <= ratio^t <= max_mag}.
struct GuessGrid {
  double ratio = 1.0;
  double min_mag = 0.0;
  double max_mag = 0.0;

  /// Nearest grid value in log scale; magnitudes below min_mag round to 0,
  /// magnitudes above max_mag clamp to the top power.
  double round_to_grid(double x) const;
  Matrix round_to_grid(const Matrix& m) const;

  /// Odd-sized list {0, +/- powers of ratio}, at most `cap` values, evenly
  /// spread in log scale between min_mag and max_mag (every value is an
  /// exact power of ratio, hence a grid member).
  std::vector<double> enumeration_values(int cap) const;
};

GuessGrid make_guess_grid(double a_norm_p, Index k, double eps, double f,
                          double poly_exponent = 3.0);

/// Ascending powers of (1+eps) spanning [ (eps^2/f) ||A||_p / d^{1/p},
/// c_hi ||A||_p ]; consecutive ratios are exactly 1+eps.
struct CostBoundGrid {
  std::vector<double> values;
  double eps = 0.0;
};

CostBoundGrid make_cost_bound_grid(double a_norm_p, Index d, double eps, double f, double p,
                                   double c_hi = 2.0);

/// Fractional assignment of cost bounds to columns. x(i, c) is the weight of
/// cost bound c for column i; entries for unavailable (i, c) pairs are zero.
struct ColumnLpSolution {
  Matrix x;
  bool feasible = false;
};

/// The LP over x_{i,c}: per-column weights form a distribution, the mixed
/// norm sum x * norms_pow stays within norm_budget and the mixed cost
/// sum x * costs^p within delta. Unavailable (i,c) pairs are marked by NaN
/// in `costs`.
ColumnLpSolution build_cost_bound_lp(const Matrix& costs, const Matrix& norms_pow,
                                     double delta, double norm_budget, double p);

struct RoundedFactorDraw {
  Matrix v;  // k x d
  bool accepted = false;
  int draws_used = 0;
};

/// Randomized rounding of the LP solution: each column samples a cost bound
/// from its x-distribution; a draw is accepted when the assembled factor
/// meets both the norm cap and the sketched cost cap. The last draw is
/// returned unaccepted if every trial fails.
RoundedFactorDraw sample_rounded_right_factor(
    const ColumnLpSolution& lp, const std::vector<std::vector<Vector>>& catalog,
    const Matrix& guess, const Matrix& sketched_a, const MedPConstant& medp, double p,
    double norm_cap_pow, double cost_cap, int trials, SeededRng& rng);

struct FptBudget {
  Index sketch_rows = 13;
  int grid_values_per_entry = 7;
  long max_guesses = 1'000'000;
  double q_norm_constant = -1.0;  // <= 0 means q = k
  int median_subset_cap = 14;
  enum class Mode { kFullEnumeration, kOracleGuided };
  Mode mode = Mode::kFullEnumeration;
  std::optional<Matrix> oracle_left_factor;    // n x k, oracle mode only
  std::optional<Matrix> constraint_basis;       // restrict left factor to span(R)
  double grid_poly_exponent = 3.0;
  double cost_upper_constant = 2.0;             // c_hi of the cost bound grid
  double delta_eps_constant = 2.0;              // c_eps in (1 + c_eps*eps)^p
};

struct FptResult {
  FactorPair factors;
  bool exact_rank_shortcut = false;
  bool any_lp_feasible = false;
  bool best_draw_accepted = false;
  int best_draws_used = 0;
  bool budget_exhausted = false;
  long guesses_evaluated = 0;
  std::vector<double> per_guess_errors;  // full-enumeration audit trail (inf = LP infeasible)
};

/// Guess rounded sketched left factors M, solve the per-column
/// median-constrained programs and the cost-bound LP for each, round, refit
/// the left factor, and keep the best guess by true lp error. Inputs with
/// rank <= k return exactly. opt_hat is the OPT estimate entering delta.
FptResult guessing_additive_eps_approximation(const Matrix& a, Index k, double eps, double f,
                                              double opt_hat, double p,
                                              const FptBudget& budget, SeededRng& rng);

struct FptWrapperResult {
  FactorPair factors;  // rank <= 3k
  double initializer_error = 0.0;
  double svd_error = 0.0;
  std::vector<double> opt_grid;
  int chosen_grid_index = -1;
};

/// Full pipeline: poly(k) rank-k initializer B, opt-estimate grid from the
/// l2 SVD of the residual, and guessing_additive_eps_approximation at rank
/// 2k on the residual for each estimate. Output rank <= 3k. In oracle mode,
/// if no left factor is injected, the residual's top-2k SVD factor is used.
FptWrapperResult rounding_guessing_eps_approximation(const Matrix& a, Index k, double eps,
                                                     double p, const FptBudget& budget,
                                                     SeededRng& rng, double f = 8.0,
                                                     const BlockEnumConfig& init_cfg = {});

}  // namespace lpra
