#pragma once

#include <cstdint>
#include <string>

#include "lpra/matrix.hpp"
#include "lpra/rng.hpp"

namespace lpra {

struct PlantedInstance {
  Matrix a;
  Matrix u_star;  // n x k
  Matrix v_star;  // k x d
  double noise_norm_p = 0.0;
  std::uint64_t seed = 0;
  Index k = 0;
  double p = 1.0;
};

/// A = U* V* + noise with Gaussian factors. noise_scale is relative: the
/// noise matrix is rescaled so its lp norm equals noise_scale * ||U* V*||_p
/// exactly, and that value is recorded as noise_norm_p (an upper bound on
/// OPT_k by construction).
PlantedInstance planted_instance(Index n, Index d, Index k, double noise_scale, double p,
                                 SeededRng& rng);

struct HardInstance {
  Matrix m;  // (k + n) x n: Gaussian block on top of an identity block
  Index k = 0;
  Index n = 0;
  std::uint64_t seed = 0;

  /// min_rank-k ||M_k - M||_p^p <= n, witnessed by zeroing the identity block.
  double opt_upper_bound_pth_power() const { return static_cast<double>(n); }
};

HardInstance hard_instance(Index k, Index n, SeededRng& rng);

/// Upper bound on OPT_k via alternating minimization from SVD and random
/// initializations; for k == cols-1 the dual characterization
/// min_{||x||_{p*}=1} ||Ax||_p is evaluated as well (exactly, via LPs, for
/// p = 1; by projected gradient on the dual sphere for p in (1,2)) and the
/// smaller of the two paths is returned. Intended for desk-scale instances.
double brute_force_opt(const Matrix& a, Index k, double p, int restarts, SeededRng& rng);

/// lp error of the rank-k truncated SVD.
double svd_baseline(const Matrix& a, Index k, double p);

/// Rank-k truncated SVD factors (left factor carries the singular values).
void truncated_svd(const Matrix& a, Index k, Matrix* left, Matrix* right);

/// Matrix Market file plus a JSON sidecar (seed, k, p, noise_norm_p).
void save_planted_instance(const PlantedInstance& inst, const std::string& matrix_path,
                           const std::string& sidecar_path);
PlantedInstance load_planted_instance(const std::string& matrix_path,
                                      const std::string& sidecar_path);

Matrix gaussian_matrix(Index rows, Index cols, SeededRng& rng);

}  // namespace lpra
