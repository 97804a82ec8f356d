#include "lpra/rankreduce.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "lpra/lewis.hpp"
#include "lpra/oracle.hpp"
#include "lpra/sketch.hpp"
#include "lpra/solvers.hpp"

namespace lpra {

namespace {

double binomial_count(Index b, Index r) {
  double c = 1.0;
  for (Index i = 0; i < r; ++i) {
    c *= static_cast<double>(b - i) / static_cast<double>(i + 1);
    if (c > 1e18) return 1e18;
  }
  return c;
}

ColumnIndexSet union_of(const std::vector<ColumnIndexSet>& blocks, const std::vector<int>& which) {
  ColumnIndexSet s;
  for (int i : which) s = s.united_with(blocks[static_cast<std::size_t>(i)]);
  return s;
}

double subset_cost(const Matrix& u, const Matrix& target, double p) {
  MultiRegressionResult fit = multi_response_regression(u, target, p);
  double acc = 0.0;
  for (Index j = 0; j < fit.costs.size(); ++j) acc += std::pow(fit.costs(j), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace

BlockEnumResult poly_k_error_and_rank(const Matrix& a, Index k, double p, SeededRng& rng,
                                      const BlockEnumConfig& cfg) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw InvalidInput("poly_k_error_and_rank: epsilon must lie in (0,1)");
  }
  SeededRng css_rng = rng.fork("css");
  CssResult css = random_column_subset_selection(a, k, p, css_rng, cfg.css);
  const Index b = static_cast<Index>(css.blocks.size());
  const Index r = css_block_r(k, p, cfg.css);

  BlockEnumResult out;
  if (static_cast<double>(b) < (cfg.big_constant_C / cfg.epsilon) * static_cast<double>(r)) {
    out.selected = css.selected;
    out.u = select_columns(a, out.selected);
    out.chosen_blocks.resize(static_cast<std::size_t>(b));
    std::iota(out.chosen_blocks.begin(), out.chosen_blocks.end(), 0);
    out.evaluated_error = 0.0;
    return out;
  }

  // Shared evaluation target: either A itself or one Lewis sketch of it.
  Matrix eval_a = a;
  std::optional<SamplingMatrix> shared;
  if (cfg.shared_sketch) {
    SeededRng lw_rng = rng.fork("shared-sketch");
    Matrix a_t = select_columns(a, css.selected);
    LewisWeights lw = lewis_weights(a_t, p);
    SamplingMatrix s = sampling_matrix(lw, lewis_sample_count(a_t.cols(), p, cfg.lewis_c0), lw_rng);
    shared = s;
    eval_a = apply_sampling(s, a);
  }
  auto evaluate = [&](const std::vector<int>& which) {
    ColumnIndexSet cols = union_of(css.blocks, which);
    Matrix u = select_columns(a, cols);
    if (shared.has_value()) u = apply_sampling(*shared, u);
    return subset_cost(u, eval_a, p);
  };

  const double subsets = binomial_count(b, r);
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> best_subset;

  if (subsets <= static_cast<double>(cfg.subset_budget)) {
    std::vector<int> comb(static_cast<std::size_t>(r));
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      const double cost = evaluate(comb);
      if (cost < best_cost) {
        best_cost = cost;
        best_subset = comb;
      }
      Index i = r - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == static_cast<int>(b - r + i)) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < r; ++j) {
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  } else {
    // Greedy forward selection of blocks, one at a time.
    out.greedy_fallback = true;
    std::vector<int> chosen;
    std::vector<char> used(static_cast<std::size_t>(b), 0);
    for (Index step = 0; step < r; ++step) {
      int pick = -1;
      double pick_cost = std::numeric_limits<double>::infinity();
      for (int j = 0; j < static_cast<int>(b); ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        std::vector<int> trial = chosen;
        trial.push_back(j);
        const double cost = evaluate(trial);
        if (cost < pick_cost) {
          pick_cost = cost;
          pick = j;
        }
      }
      chosen.push_back(pick);
      used[static_cast<std::size_t>(pick)] = 1;
      best_cost = pick_cost;
    }
    std::sort(chosen.begin(), chosen.end());
    best_subset = chosen;
  }

  out.chosen_blocks = best_subset;
  out.selected = union_of(css.blocks, best_subset);
  out.u = select_columns(a, out.selected);
  out.evaluated_error = best_cost;
  return out;
}

FactorPair remove_bicriteria_rank(const Matrix& u_b, const Matrix& v_b, Index k, double p,
                                  SeededRng& rng) {
  if (u_b.cols() != v_b.rows()) throw InvalidInput("remove_bicriteria_rank: factor mismatch");
  const Index r = u_b.cols();
  if (k > r) throw InvalidInput("remove_bicriteria_rank: k must be <= rank of the input pair");

  FactorPair out;
  out.target_rank = k;
  out.seed = rng.seed();
  out.algorithm_tag = "remove_bicriteria_rank";

  const Matrix b = u_b * v_b;
  if (k == r) {
    out.left = u_b;
    out.right = v_b;
    out.achieved_error_p = 0.0;
    return out;
  }

  // Orthonormal basis of colspace(U_B); the output left factor is kept inside
  // it so that B - WZ cannot leave the span of the input factorization.
  Eigen::ColPivHouseholderQR<Matrix> qr(u_b);
  const Index rank_u = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(u_b.rows(), std::max<Index>(rank_u, 1));

  const Index sketch_rows = std::max<Index>(20, 8 * k + 4);
  PStableSketch s = p_stable_sketch(sketch_rows, b.rows(), p, rng);
  Matrix sb = s.matrix * b;

  Matrix z;
  {
    Matrix l, rr;
    truncated_svd(sb, k, &l, &rr);
    z = rr;  // k x d right row space of the sketched matrix
  }

  Matrix w;
  for (int round = 0; round < 2; ++round) {
    w = best_left_factor(z, b, p);
    w = q * (q.transpose() * w);
    MultiRegressionResult fit = multi_response_regression(w, b, p);
    z = fit.x;
  }

  out.left = w;
  out.right = z;
  out.achieved_error_p = entrywise_norm(b - w * z, p);
  return out;
}

FactorPair poly_k_not_bicriteria(const Matrix& a, Index k, double p, SeededRng& rng,
                                 const BlockEnumConfig& cfg) {
  BlockEnumResult blocks = poly_k_error_and_rank(a, k, p, rng, cfg);
  const Matrix& u = blocks.u;

  // Right factor through a Lewis sketch of the selected columns.
  Matrix su = u, sa = a;
  if (u.rows() > 0 && u.cols() > 0) {
    SeededRng lw_rng = rng.fork("right-factor-sketch");
    LewisWeights lw = lewis_weights(u, p);
    const Index rows = lewis_sample_count(u.cols(), p, cfg.lewis_c0);
    if (rows < u.rows()) {
      SamplingMatrix s = sampling_matrix(lw, rows, lw_rng);
      su = apply_sampling(s, u);
      sa = apply_sampling(s, a);
    }
  }
  MultiRegressionResult fit = multi_response_regression(su, sa, p);

  SeededRng rr_rng = rng.fork("remove-bicriteria");
  FactorPair reduced = remove_bicriteria_rank(u, fit.x, k, p, rr_rng);
  reduced.algorithm_tag = "poly_k_not_bicriteria";
  reduced.achieved_error_p = entrywise_norm(a - reduced.left * reduced.right, p);
  reduced.target_rank = k;
  return reduced;
}

}  // namespace lpra
