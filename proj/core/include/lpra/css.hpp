#pragma once

#include <vector>

#include "lpra/matrix.hpp"
#include "lpra/rng.hpp"

namespace lpra {

struct CssConfig {
  double r_constant = 2.0;        // c1 in r = ceil(c1 * k * log(k+1) * [loglog]^2)
  double discard_fraction = 0.25; // delta: fraction of remaining columns retired per round
  int repeats = 0;                // candidate blocks per round; 0 -> ceil(log2 d) + 1
  int round_cap = 0;              // 0 -> ceil(log_{1/(1-delta)} d) + 1
  bool fast_sketch = false;       // sketch the per-round regressions with Lewis sampling
  double lewis_c0 = 10.0;
};

/// Block size parameter r for the sampling rounds.
Index css_block_r(Index k, double p, const CssConfig& cfg);

struct CssResult {
  ColumnIndexSet selected;                    // union of sampled blocks
  std::vector<ColumnIndexSet> blocks;         // S^(j*) per round, pairwise disjoint
  std::vector<ColumnIndexSet> covered_per_round;  // R^(j*) per round
  Vector round_costs;
  double p = 1.0;
  Index k = 0;
};

/// Iterative random column subset selection. Each round draws `repeats`
/// candidate blocks of 2r columns from the remaining set, fits every other
/// remaining column onto each block, scores a block by the sum of its
/// bottom ceil(delta*m) regression costs (p-th powers), keeps the best
/// block, and retires block + covered columns. A final cleanup round absorbs
/// everything once at most 2r columns remain. The returned subset is the
/// union of sampled blocks only; covered columns are recorded separately.
CssResult random_column_subset_selection(const Matrix& a, Index k, double p, SeededRng& rng,
                                         const CssConfig& cfg = {});

/// Total lp error of fitting every column of A onto the subset A_S.
double css_error(const Matrix& a, const ColumnIndexSet& s, double p);

}  // namespace lpra
