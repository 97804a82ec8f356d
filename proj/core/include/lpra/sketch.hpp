#pragma once

#include <cstdint>

#include "lpra/matrix.hpp"
#include "lpra/rng.hpp"

namespace lpra {

/// One draw of a standard p-stable variable (characteristic function
/// e^{-|t|^p}), via the Chambers-Mallows-Stuck transform. Cauchy at p = 1;
/// at p = 2 the law is N(0,2) under this normalization, which is the price
/// of the stability identity sum x_i Z_i ~ ||x||_p Z holding exactly.
double sample_p_stable(double p, SeededRng& rng);

struct PStableSketch {
  Matrix matrix;  // r x n of i.i.d. standard p-stable draws
  double p = 1.0;
  std::uint64_t seed = 0;
};

PStableSketch p_stable_sketch(Index rows, Index cols, double p, SeededRng& rng);

struct MedPConstant {
  double p = 1.0;
  double value = 1.0;
  int quadrature_points = 0;
};

/// Median of |Z| for standard p-stable Z. Exactly 1 at p = 1; for p in (1,2]
/// solved by bisection over the stable CDF evaluated with adaptive Simpson
/// quadrature of the Zolotarev/Nolan integrand (endpoints truncated).
/// Values are cached per p. Absolute accuracy 1e-4.
MedPConstant med_p(double p);

/// Uncached variant starting the interval-doubling at `base_points` Simpson
/// intervals; lets callers verify stability under quadrature refinement.
MedPConstant med_p_at_resolution(double p, int base_points);

/// ceil(alpha*n)-th smallest of |v_i|; median_abs is the alpha = 1/2 case.
double quantile_abs(const Vector& v, double alpha);
double median_abs(const Vector& v);

/// (sum_cols median_abs(M_col)^p)^(1/p) / med_p -- the sketched lp norm
/// estimate behind the median sketch.
double median_sketch_cost(const Matrix& m, const MedPConstant& medp, double p);

}  // namespace lpra
