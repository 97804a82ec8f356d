#pragma once

#include <vector>

#include "lpra/matrix.hpp"
#include "lpra/rng.hpp"

namespace lpra {

struct LewisWeights {
  Vector weights;               // length n, each in [0, 1 + eps]
  double p = 1.0;
  double fixed_point_residual = 0.0;   // max-norm residual of w = tau(W^{1/2-1/p} A)
  bool converged = true;
  std::vector<double> residual_history;
};

/// lp Lewis weights by the standard fixed-point iteration
///   w_i <- (w_i^{2/p-1} * tau_i(W^{1/2-1/p} A))^{p/2}
/// where tau is the l2 leverage score, computed via a thin rank-revealing QR
/// of the rescaled matrix. Contractive for p < 4; p = 2 reduces to plain
/// leverage scores in a single step. Rank deficiency is handled by the
/// rank-revealing decomposition. Non-convergence is flagged, not thrown.
LewisWeights lewis_weights(const Matrix& a, double p, int max_iters = 200, double tol = 1e-8);

/// l2 leverage scores, diag(A (A^T A)^+ A^T), via column-pivoted QR.
Vector leverage_scores(const Matrix& a);

struct SamplingMatrix {
  struct Entry {
    Index source_row;
    double scale;  // 1/(r * p_i)^{1/p}
  };
  std::vector<Entry> entries;
  Index source_rows_count = 0;
  double p = 1.0;
};

/// r i.i.d. draws from the distribution p_i = w_i / sum(w), each row scaled
/// by 1/(r p_i)^{1/p}.
SamplingMatrix sampling_matrix(const LewisWeights& w, Index r, SeededRng& rng);

Matrix apply_sampling(const SamplingMatrix& s, const Matrix& a);

/// Default row counts for a t-dimensional subspace: ceil(c0 t log t) for
/// p = 1 and an extra (log log t)^2 factor for p in (1,2). The constants
/// inside the asymptotics are engineering choices (c0 defaults to 10).
Index lewis_sample_count(Index t, double p, double c0 = 10.0);

}  // namespace lpra
