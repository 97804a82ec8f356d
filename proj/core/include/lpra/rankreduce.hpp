#pragma once

#include <vector>

#include "lpra/css.hpp"
#include "lpra/matrix.hpp"
#include "lpra/rng.hpp"

namespace lpra {

struct BlockEnumConfig {
  double epsilon = 0.1;          // in (0,1)
  double big_constant_C = 8.0;   // small-b branch threshold: b < (C/eps) * r
  bool shared_sketch = false;    // evaluate subsets through one Lewis sketch
  long subset_budget = 1'000'000;
  CssConfig css;
  double lewis_c0 = 10.0;
};

struct BlockEnumResult {
  Matrix u;                        // selected columns of A
  ColumnIndexSet selected;
  std::vector<int> chosen_blocks;  // round indices of the winning subset
  bool greedy_fallback = false;    // subset budget forced greedy selection
  double evaluated_error = 0.0;    // error metric used for the argmin
};

/// Runs column subset selection to get b blocks; when b is small relative to
/// (C/eps)*r the union of all blocks is returned directly, otherwise all
/// size-r subsets of blocks are enumerated and the best-fitting union wins
/// (optionally scored through a single shared Lewis sampling matrix). If
/// C(b, r) exceeds the subset budget, greedy forward selection of blocks is
/// used instead and the result is flagged.
BlockEnumResult poly_k_error_and_rank(const Matrix& a, Index k, double p, SeededRng& rng,
                                      const BlockEnumConfig& cfg = {});

/// Contract substitute for the cited rank-reduction black box: given
/// B = U_B V_B of rank <= r and k <= r, returns W (n x k), Z (k x d) with
/// ||WZ - B||_p small relative to the best rank-k approximation of B.
/// Implementation: p-stable row sketch of B down to poly(k) rows, rank-k l2
/// SVD of the sketch for an initial right row space, then two alternation
/// rounds of lp refinement; the left factor is kept inside colspace(U_B).
FactorPair remove_bicriteria_rank(const Matrix& u_b, const Matrix& v_b, Index k, double p,
                                  SeededRng& rng);

/// Chains poly_k_error_and_rank -> Lewis-sketched right factor ->
/// remove_bicriteria_rank; output rank <= k.
FactorPair poly_k_not_bicriteria(const Matrix& a, Index k, double p, SeededRng& rng,
                                 const BlockEnumConfig& cfg = {});

}  // namespace lpra
