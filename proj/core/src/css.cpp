#include "lpra/css.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lpra/lewis.hpp"
#include "lpra/solvers.hpp"

namespace lpra {

Index css_block_r(Index k, double p, const CssConfig& cfg) {
  const double kd = static_cast<double>(std::max<Index>(k, 1));
  double r = cfg.r_constant * kd * std::log(kd + 1.0);
  if (p > 1.0 && p < 2.0) {
    const double ll = std::log(std::log(kd + 2.0) + 2.0);
    r *= ll * ll;
  }
  return std::max<Index>(1, static_cast<Index>(std::ceil(r)));
}

namespace {

std::vector<Index> sample_without_replacement(const std::vector<Index>& pool, Index count,
                                              SeededRng& rng) {
  std::vector<Index> scratch = pool;
  const Index n = static_cast<Index>(scratch.size());
  for (Index i = 0; i < count; ++i) {
    const Index j = i + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(scratch[static_cast<std::size_t>(i)], scratch[static_cast<std::size_t>(j)]);
  }
  scratch.resize(static_cast<std::size_t>(count));
  return scratch;
}

}  // namespace

CssResult random_column_subset_selection(const Matrix& a, Index k, double p, SeededRng& rng,
                                         const CssConfig& cfg) {
  if (k < 1) throw InvalidInput("random_column_subset_selection: k must be >= 1");
  const Index d = a.cols();
  if (d < 1) throw InvalidInput("random_column_subset_selection: empty matrix");
  require_finite(a, "random_column_subset_selection");

  const Index r = css_block_r(k, p, cfg);
  const Index block = 2 * r;
  const double delta = cfg.discard_fraction;
  const int repeats =
      cfg.repeats > 0 ? cfg.repeats
                      : static_cast<int>(std::ceil(std::log2(std::max<double>(2.0, d)))) + 1;
  const int round_cap =
      cfg.round_cap > 0
          ? cfg.round_cap
          : static_cast<int>(std::ceil(std::log(static_cast<double>(d)) /
                                       -std::log1p(-delta))) + 1;

  CssResult out;
  out.p = p;
  out.k = k;

  std::vector<Index> remaining(static_cast<std::size_t>(d));
  std::iota(remaining.begin(), remaining.end(), Index{0});
  std::vector<double> round_costs;

  int round = 0;
  while (!remaining.empty()) {
    ++round;
    const Index t_size = static_cast<Index>(remaining.size());
    if (t_size <= block || round > round_cap) {
      // Cleanup: absorb everything still uncovered into a final block.
      out.blocks.emplace_back(remaining);
      out.covered_per_round.emplace_back();
      round_costs.push_back(0.0);
      break;
    }

    // Draw all candidate blocks up front so the RNG stream is independent of
    // how the evaluations are scheduled.
    std::vector<std::vector<Index>> candidates;
    candidates.reserve(static_cast<std::size_t>(repeats));
    for (int j = 0; j < repeats; ++j) {
      auto idx = sample_without_replacement(remaining, block, rng);
      std::sort(idx.begin(), idx.end());
      candidates.push_back(std::move(idx));
    }
    SeededRng lewis_rng = rng.fork("css-fast-sketch");

    double best_cost = std::numeric_limits<double>::infinity();
    int best_j = -1;
    std::vector<Index> best_rest;

    for (int j = 0; j < repeats; ++j) {
      const auto& cand = candidates[static_cast<std::size_t>(j)];
      std::vector<Index> rest;
      rest.reserve(remaining.size() - cand.size());
      std::set_difference(remaining.begin(), remaining.end(), cand.begin(), cand.end(),
                          std::back_inserter(rest));
      const Index m = static_cast<Index>(rest.size());

      Matrix u = select_columns(a, ColumnIndexSet(cand));
      Matrix b = select_columns(a, ColumnIndexSet(rest));
      if (cfg.fast_sketch) {
        SeededRng sub = lewis_rng.fork(static_cast<std::uint64_t>(j));
        LewisWeights lw = lewis_weights(u, p);
        SamplingMatrix s = sampling_matrix(lw, lewis_sample_count(u.cols(), p, cfg.lewis_c0), sub);
        u = apply_sampling(s, u);
        b = apply_sampling(s, b);
      }
      MultiRegressionResult fit = multi_response_regression(u, b, p);

      const Index keep = std::max<Index>(1, static_cast<Index>(std::ceil(delta * m)));
      std::vector<Index> order(static_cast<std::size_t>(m));
      std::iota(order.begin(), order.end(), Index{0});
      std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
        if (fit.costs(x) != fit.costs(y)) return fit.costs(x) < fit.costs(y);
        return rest[static_cast<std::size_t>(x)] < rest[static_cast<std::size_t>(y)];
      });
      double cost = 0.0;
      for (Index i = 0; i < keep; ++i) {
        cost += std::pow(fit.costs(order[static_cast<std::size_t>(i)]), p);
      }
      if (cost < best_cost) {
        best_cost = cost;
        best_j = j;
        best_rest.clear();
        for (Index i = 0; i < keep; ++i) {
          best_rest.push_back(rest[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
        }
      }
    }

    const auto& winner = candidates[static_cast<std::size_t>(best_j)];
    out.blocks.emplace_back(winner);
    out.covered_per_round.emplace_back(best_rest);
    round_costs.push_back(best_cost);

    std::vector<Index> retire = winner;
    retire.insert(retire.end(), best_rest.begin(), best_rest.end());
    std::sort(retire.begin(), retire.end());
    std::vector<Index> next;
    next.reserve(remaining.size());
    std::set_difference(remaining.begin(), remaining.end(), retire.begin(), retire.end(),
                        std::back_inserter(next));
    remaining = std::move(next);
  }

  out.round_costs = Eigen::Map<Vector>(round_costs.data(), static_cast<Index>(round_costs.size()));
  ColumnIndexSet all;
  for (const auto& blk : out.blocks) all = all.united_with(blk);
  out.selected = std::move(all);
  return out;
}

double css_error(const Matrix& a, const ColumnIndexSet& s, double p) {
  s.check_against(a.cols());
  if (s.empty()) return entrywise_norm(a, p);
  Matrix u = select_columns(a, s);
  MultiRegressionResult fit = multi_response_regression(u, a, p);
  double acc = 0.0;
  for (Index j = 0; j < fit.costs.size(); ++j) acc += std::pow(fit.costs(j), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace lpra
