#include "lpra/fpt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lpra/oracle.hpp"
#include "lpra/parallel.hpp"
#include "lpra/simplex.hpp"
#include "lpra/solvers.hpp"

namespace lpra {

double GuessGrid::round_to_grid(double x) const {
  if (x == 0.0) return 0.0;
  const double mag = std::abs(x);
  const double log_ratio = std::log(ratio);
  double t = std::round(std::log(mag) / log_ratio);
  double rounded = std::exp(t * log_ratio);
  if (rounded < min_mag) {
    // Below the cutoff the entry is dropped unless it is closer to min_mag.
    rounded = (mag >= min_mag / std::sqrt(ratio)) ? min_mag : 0.0;
  }
  if (rounded > max_mag) rounded = max_mag;
  return std::copysign(rounded, x);
}

Matrix GuessGrid::round_to_grid(const Matrix& m) const {
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = round_to_grid(m(i, j));
  }
  return out;
}

std::vector<double> GuessGrid::enumeration_values(int cap) const {
  if (cap < 3) throw InvalidInput("GuessGrid: need at least 3 enumeration values");
  const int half = (cap - 1) / 2;
  const double log_ratio = std::log(ratio);
  const double t_lo = std::ceil(std::log(min_mag) / log_ratio);
  const double t_hi = std::floor(std::log(max_mag) / log_ratio);
  const double span = std::max(0.0, t_hi - t_lo);
  std::vector<double> mags;
  for (int i = 0; i < half; ++i) {
    const double frac = half == 1 ? 0.0 : static_cast<double>(i) / (half - 1);
    const double t = std::round(t_lo + frac * span);
    const double v = std::exp(t * log_ratio);
    if (mags.empty() || v > mags.back() * (1.0 + 1e-12)) mags.push_back(v);
  }
  std::vector<double> out;
  out.push_back(0.0);
  for (double v : mags) {
    out.push_back(v);
    out.push_back(-v);
  }
  return out;
}

GuessGrid make_guess_grid(double a_norm_p, Index k, double eps, double f,
                          double poly_exponent) {
  if (!(f > 1.0)) throw InvalidInput("make_guess_grid: f must be > 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("make_guess_grid: eps must be in (0,1)");
  const double poly = std::pow(static_cast<double>(std::max<Index>(k, 1)) / eps, poly_exponent);
  GuessGrid g;
  g.ratio = 1.0 + 1.0 / (f * poly);
  g.min_mag = a_norm_p / (f * poly);
  g.max_mag = poly * a_norm_p;
  if (!(g.min_mag < g.max_mag)) throw InvalidInput("make_guess_grid: degenerate grid");
  return g;
}

CostBoundGrid make_cost_bound_grid(double a_norm_p, Index d, double eps, double f, double p,
                                   double c_hi) {
  CostBoundGrid grid;
  grid.eps = eps;
  const double lo = (eps * eps / f) * a_norm_p / std::pow(static_cast<double>(d), 1.0 / p);
  const double hi = c_hi * a_norm_p;
  const double log_step = std::log1p(eps);
  const double log_lo = std::log(lo);
  double v = lo;
  for (int t = 0; v < hi * (1.0 + eps); ++t) {
    grid.values.push_back(v);
    // Renormalize from logs periodically so the grid stays an exact
    // geometric sequence without multiplicative drift.
    v = (t % 32 == 31) ? std::exp(log_lo + (t + 1) * log_step) : v * (1.0 + eps);
    if (t > 100000) throw std::runtime_error("make_cost_bound_grid: runaway grid");
  }
  return grid;
}

ColumnLpSolution build_cost_bound_lp(const Matrix& costs, const Matrix& norms_pow,
                                     double delta, double norm_budget, double p) {
  const Index d = costs.rows();
  const Index nc = costs.cols();
  if (norms_pow.rows() != d || norms_pow.cols() != nc) {
    throw InvalidInput("build_cost_bound_lp: shape mismatch");
  }

  ColumnLpSolution out;
  out.x = Matrix::Zero(d, nc);

  std::vector<std::pair<Index, Index>> vars;
  for (Index i = 0; i < d; ++i) {
    bool any = false;
    for (Index c = 0; c < nc; ++c) {
      if (std::isfinite(costs(i, c))) {
        vars.emplace_back(i, c);
        any = true;
      }
    }
    if (!any) return out;  // a column with no feasible bound at all
  }

  const Index nv = static_cast<Index>(vars.size());
  // Variables: x_{i,c} plus two slacks. Rows: d simplex rows + 2 caps.
  // Among feasible points, the lowest mixed cost is preferred: it steers
  // every column toward the tightest workable bound.
  Matrix A = Matrix::Zero(d + 2, nv + 2);
  Vector b = Vector::Zero(d + 2);
  Vector obj = Vector::Zero(nv + 2);
  for (Index v = 0; v < nv; ++v) {
    const auto [i, c] = vars[static_cast<std::size_t>(v)];
    A(i, v) = 1.0;
    A(d, v) = norms_pow(i, c);
    A(d + 1, v) = std::pow(costs(i, c), p);
    obj(v) = A(d + 1, v);
  }
  b.head(d).setOnes();
  A(d, nv) = 1.0;
  b(d) = norm_budget;
  A(d + 1, nv + 1) = 1.0;
  b(d + 1) = delta;

  LpSolution lp = simplex_solve(A, b, obj);
  if (lp.status != LpStatus::kOptimal) return out;
  for (Index v = 0; v < nv; ++v) {
    const auto [i, c] = vars[static_cast<std::size_t>(v)];
    out.x(i, c) = std::max(0.0, lp.x(v));
  }
  out.feasible = true;
  return out;
}

RoundedFactorDraw sample_rounded_right_factor(
    const ColumnLpSolution& lp, const std::vector<std::vector<Vector>>& catalog,
    const Matrix& guess, const Matrix& sketched_a, const MedPConstant& medp, double p,
    double norm_cap_pow, double cost_cap, int trials, SeededRng& rng) {
  const Index d = lp.x.rows();
  const Index nc = lp.x.cols();
  const Index k = guess.cols();
  RoundedFactorDraw out;
  out.v = Matrix::Zero(k, d);
  if (!lp.feasible) return out;

  for (int t = 0; t < trials; ++t) {
    Matrix v(k, d);
    for (Index i = 0; i < d; ++i) {
      const double u = rng.uniform();
      double acc = 0.0;
      Index pick = -1;
      for (Index c = 0; c < nc; ++c) {
        acc += lp.x(i, c);
        if (u < acc && lp.x(i, c) > 0.0) {
          pick = c;
          break;
        }
      }
      if (pick < 0) {  // numerical slack in the simplex row: take the last positive weight
        for (Index c = nc - 1; c >= 0; --c) {
          if (lp.x(i, c) > 0.0) {
            pick = c;
            break;
          }
        }
      }
      v.col(i) = catalog[static_cast<std::size_t>(i)][static_cast<std::size_t>(pick)];
    }
    out.v = v;
    out.draws_used = t + 1;

    const double norm_pow = entrywise_norm_pow(v, p);
    double cost_pow = 0.0;
    const Matrix res = guess * v - sketched_a;
    for (Index i = 0; i < d; ++i) {
      Vector col = res.col(i);
      cost_pow += std::pow(median_abs(col) / medp.value, p);
    }
    if (norm_pow <= norm_cap_pow && cost_pow <= cost_cap) {
      out.accepted = true;
      break;
    }
  }
  return out;
}

namespace {

struct GuessOutcome {
  bool lp_feasible = false;
  bool accepted = false;
  int draws_used = 0;
  double error = std::numeric_limits<double>::infinity();
  Matrix u, v;
};

struct GuessContext {
  const Matrix* a;
  const Matrix* sketched_a;
  const CostBoundGrid* bounds;
  const MedPConstant* medp;
  double p;
  double delta;
  double norm_budget;
  double eps;
  int subset_cap;
  int trials;
  const std::optional<Matrix>* constraint_basis;
};

GuessOutcome evaluate_guess(const Matrix& m, const GuessContext& ctx, SeededRng rng) {
  const Index d = ctx.a->cols();
  const Index nc = static_cast<Index>(ctx.bounds->values.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  Matrix costs = Matrix::Constant(d, nc, nan);
  Matrix norms_pow = Matrix::Constant(d, nc, nan);
  std::vector<std::vector<Vector>> catalog(static_cast<std::size_t>(d));
  for (auto& col : catalog) col.assign(static_cast<std::size_t>(nc), Vector());

  // Cost bounds are scanned from the top down: once a bound is infeasible,
  // every smaller one is too.
  parallel_for(static_cast<std::size_t>(d), [&](std::size_t i) {
    const Vector s = ctx.sketched_a->col(static_cast<Index>(i));
    for (Index c = nc - 1; c >= 0; --c) {
      auto sol = min_norm_with_median_constraint(m, s, ctx.bounds->values[static_cast<std::size_t>(c)],
                                                 ctx.p, ctx.medp->value, ctx.subset_cap);
      if (!sol.has_value()) break;
      costs(static_cast<Index>(i), c) = sol->med_over_medp;
      norms_pow(static_cast<Index>(i), c) = std::pow(sol->norm_p, ctx.p);
      catalog[i][static_cast<std::size_t>(c)] = sol->v;
    }
  }, 2);

  GuessOutcome out;
  ColumnLpSolution lp = build_cost_bound_lp(costs, norms_pow, ctx.delta, ctx.norm_budget, ctx.p);
  if (!lp.feasible) return out;
  out.lp_feasible = true;

  RoundedFactorDraw draw = sample_rounded_right_factor(
      lp, catalog, m, *ctx.sketched_a, *ctx.medp, ctx.p, 2.0 * ctx.norm_budget / ctx.eps,
      (1.0 + 2.0 * ctx.eps) * ctx.delta, ctx.trials, rng);
  out.accepted = draw.accepted;
  out.draws_used = draw.draws_used;

  Matrix u = best_left_factor(draw.v, *ctx.a, ctx.p, *ctx.constraint_basis);
  out.u = u;
  out.v = draw.v;
  out.error = entrywise_norm(u * draw.v - *ctx.a, ctx.p);
  return out;
}

// Rescale an injected left factor so its optimal right factor has unit-norm
// rows; the norm-budget constraint of the LP presumes a well-conditioned
// right factor.
Matrix normalize_oracle_factor(const Matrix& u0, const Matrix& a, double p) {
  MultiRegressionResult fit = multi_response_regression(u0, a, p);
  Matrix u = u0;
  for (Index j = 0; j < fit.x.rows(); ++j) {
    Vector row = fit.x.row(j).transpose();
    const double norm = lp_norm(row, p);
    if (norm > 0.0) u.col(j) *= norm;
  }
  return u;
}

}  // namespace

FptResult guessing_additive_eps_approximation(const Matrix& a, Index k, double eps, double f,
                                              double opt_hat, double p,
                                              const FptBudget& budget, SeededRng& rng) {
  if (k < 1) throw InvalidInput("guessing_additive_eps_approximation: k must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0,1)");
  if (!(f > 1.0)) throw InvalidInput("f must be > 1");
  if (opt_hat < 0.0) throw InvalidInput("opt_hat must be >= 0");
  require_finite(a, "guessing_additive_eps_approximation");

  FptResult result;
  result.factors.target_rank = k;
  result.factors.seed = rng.seed();
  result.factors.algorithm_tag = "fpt_guessing";

  if (numerical_rank(a) <= k) {
    result.factors = exact_rank_factorization(a, k);
    result.factors.algorithm_tag = "fpt_guessing_exact_rank";
    result.factors.seed = rng.seed();
    result.exact_rank_shortcut = true;
    return result;
  }

  const double a_norm = entrywise_norm(a, p);
  const GuessGrid grid = make_guess_grid(a_norm, k, eps, f, budget.grid_poly_exponent);
  const CostBoundGrid bounds =
      make_cost_bound_grid(a_norm, a.cols(), eps, f, p, budget.cost_upper_constant);
  const MedPConstant medp = med_p(p);
  const double q = budget.q_norm_constant > 0.0 ? budget.q_norm_constant
                                                : static_cast<double>(k);
  const double norm_budget = static_cast<double>(k) * std::pow(q, p);
  const double poly = std::pow(static_cast<double>(k) / eps, budget.grid_poly_exponent);
  const double additive = a_norm / (f * poly);
  const double delta =
      std::pow(1.0 + budget.delta_eps_constant * eps, p) * std::pow(opt_hat + additive, p) +
      std::pow(eps * eps / f, p) * std::pow(a_norm, p);

  SeededRng sketch_rng = rng.fork("sketch");
  PStableSketch sketch = p_stable_sketch(budget.sketch_rows, a.rows(), p, sketch_rng);
  const Matrix sa = sketch.matrix * a;

  GuessContext ctx;
  ctx.a = &a;
  ctx.sketched_a = &sa;
  ctx.bounds = &bounds;
  ctx.medp = &medp;
  ctx.p = p;
  ctx.delta = delta;
  ctx.norm_budget = norm_budget;
  ctx.eps = eps;
  ctx.subset_cap = budget.median_subset_cap;
  ctx.trials = static_cast<int>(std::ceil(10.0 / eps));
  ctx.constraint_basis = &budget.constraint_basis;

  std::vector<Matrix> guesses;
  if (budget.mode == FptBudget::Mode::kOracleGuided) {
    if (!budget.oracle_left_factor.has_value()) {
      throw InvalidInput("oracle_guided mode requires an injected left factor");
    }
    if (budget.oracle_left_factor->rows() != a.rows() ||
        budget.oracle_left_factor->cols() != k) {
      throw InvalidInput("oracle_left_factor must be n x k");
    }
    Matrix u0 = normalize_oracle_factor(*budget.oracle_left_factor, a, p);
    guesses.push_back(grid.round_to_grid(sketch.matrix * u0));
  } else {
    const std::vector<double> values = grid.enumeration_values(budget.grid_values_per_entry);
    const Index cells = budget.sketch_rows * k;
    double total = 1.0;
    for (Index i = 0; i < cells; ++i) {
      total *= static_cast<double>(values.size());
      if (total > 1e18) break;
    }
    long count = total > static_cast<double>(budget.max_guesses)
                     ? budget.max_guesses
                     : static_cast<long>(total);
    result.budget_exhausted = total > static_cast<double>(budget.max_guesses);
    std::vector<std::size_t> odo(static_cast<std::size_t>(cells), 0);
    for (long g = 0; g < count; ++g) {
      Matrix m(budget.sketch_rows, k);
      for (Index i = 0; i < budget.sketch_rows; ++i) {
        for (Index j = 0; j < k; ++j) {
          m(i, j) = values[odo[static_cast<std::size_t>(i * k + j)]];
        }
      }
      guesses.push_back(std::move(m));
      for (Index c = 0; c < cells; ++c) {
        if (++odo[static_cast<std::size_t>(c)] < values.size()) break;
        odo[static_cast<std::size_t>(c)] = 0;
      }
    }
  }

  result.guesses_evaluated = static_cast<long>(guesses.size());
  std::vector<SeededRng> guess_rngs;
  guess_rngs.reserve(guesses.size());
  for (std::size_t g = 0; g < guesses.size(); ++g) {
    guess_rngs.push_back(rng.fork(static_cast<std::uint64_t>(g)));
  }

  std::vector<GuessOutcome> outcomes(guesses.size());
  parallel_for(guesses.size(), [&](std::size_t g) {
    outcomes[g] = evaluate_guess(guesses[g], ctx, guess_rngs[g]);
  }, 1);

  result.per_guess_errors.reserve(outcomes.size());
  std::size_t best = outcomes.size();
  for (std::size_t g = 0; g < outcomes.size(); ++g) {
    result.per_guess_errors.push_back(outcomes[g].error);
    if (outcomes[g].lp_feasible) result.any_lp_feasible = true;
    if (outcomes[g].error < (best == outcomes.size()
                                 ? std::numeric_limits<double>::infinity()
                                 : outcomes[best].error)) {
      best = g;
    }
  }

  if (best == outcomes.size()) {
    // Every LP infeasible: zero factorization, flagged by any_lp_feasible.
    result.factors.left = Matrix::Zero(a.rows(), k);
    result.factors.right = Matrix::Zero(k, a.cols());
    result.factors.achieved_error_p = a_norm;
    return result;
  }

  result.factors.left = outcomes[best].u;
  result.factors.right = outcomes[best].v;
  result.factors.achieved_error_p = outcomes[best].error;
  result.best_draw_accepted = outcomes[best].accepted;
  result.best_draws_used = outcomes[best].draws_used;
  return result;
}

FptWrapperResult rounding_guessing_eps_approximation(const Matrix& a, Index k, double eps,
                                                     double p, const FptBudget& budget,
                                                     SeededRng& rng, double f,
                                                     const BlockEnumConfig& init_cfg) {
  FptWrapperResult out;
  SeededRng init_rng = rng.fork("initializer");
  FactorPair b_pair = poly_k_not_bicriteria(a, k, p, init_rng, init_cfg);
  out.initializer_error = b_pair.achieved_error_p;
  const Matrix b = b_pair.left * b_pair.right;
  const Matrix c = a - b;

  Matrix c_svd_l, c_svd_r;
  truncated_svd(c, 2 * k, &c_svd_l, &c_svd_r);
  out.svd_error = entrywise_norm(c - c_svd_l * c_svd_r, p);

  const double span_exp = 1.0 / p - 0.5;
  const double nd = static_cast<double>(a.rows()) * static_cast<double>(a.cols());
  const int grid_len =
      1 + static_cast<int>(std::ceil(span_exp * std::log(nd) / std::log1p(eps))) + 1;
  for (int t = 0; t < grid_len; ++t) {
    out.opt_grid.push_back(out.svd_error / std::pow(1.0 + eps, t));
  }

  FptBudget sub_budget = budget;
  if (budget.mode == FptBudget::Mode::kOracleGuided && !budget.oracle_left_factor.has_value()) {
    sub_budget.oracle_left_factor = c_svd_l;
  }

  double best_err = std::numeric_limits<double>::infinity();
  Matrix best_u = Matrix::Zero(a.rows(), 2 * k);
  Matrix best_v = Matrix::Zero(2 * k, a.cols());
  for (int t = 0; t < grid_len; ++t) {
    SeededRng sub_rng = rng.fork(static_cast<std::uint64_t>(t) + 1000);
    FptResult res = guessing_additive_eps_approximation(c, 2 * k, eps, f, out.opt_grid[t], p,
                                                        sub_budget, sub_rng);
    Matrix uv = res.factors.left * res.factors.right;
    const double err = entrywise_norm(b + uv - a, p);
    if (err < best_err) {
      best_err = err;
      best_u = res.factors.left;
      best_v = res.factors.right;
      out.chosen_grid_index = t;
    }
  }

  // Assemble the rank <= 3k output.
  const Index kk = b_pair.left.cols();
  const Index rr = best_u.cols();
  out.factors.left = Matrix(a.rows(), kk + rr);
  out.factors.left.leftCols(kk) = b_pair.left;
  out.factors.left.rightCols(rr) = best_u;
  out.factors.right = Matrix(kk + rr, a.cols());
  out.factors.right.topRows(kk) = b_pair.right;
  out.factors.right.bottomRows(rr) = best_v;
  out.factors.target_rank = 3 * k;
  out.factors.achieved_error_p = best_err;
  out.factors.algorithm_tag = "fpt_wrapper_rank3k";
  out.factors.seed = rng.seed();
  return out;
}

}  // namespace lpra
