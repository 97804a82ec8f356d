#include "lpra/sketch_checks.hpp"

#include <cmath>

#include "lpra/sketch.hpp"

namespace lpra {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, SeededRng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

}  // namespace

CheckOutcome median_preserves_norms_check(double p, SeededRng& rng, Index n, Index d,
                                          Index r, int draws, double rel_tol, int required) {
  CheckOutcome out{"median_preserves_norms", 0, draws, required};
  const Matrix a = gaussian_matrix(n, d, rng);
  const double true_norm = entrywise_norm(a, p);
  const MedPConstant mp = med_p(p);
  for (int t = 0; t < draws; ++t) {
    PStableSketch s = p_stable_sketch(r, n, p, rng);
    const double est = median_sketch_cost(s.matrix * a, mp, p);
    if (std::abs(est - true_norm) <= rel_tol * true_norm) ++out.passes;
  }
  return out;
}

CheckOutcome one_sided_embedding_check(double p, SeededRng& rng, Index n, Index k, Index d,
                                       Index r, int sketch_draws, int v_trials,
                                       double lower_frac, int required) {
  CheckOutcome out{"one_sided_embedding", 0, sketch_draws, required};
  const Matrix u = gaussian_matrix(n, k, rng);
  const Matrix a = gaussian_matrix(n, d, rng);
  const MedPConstant mp = med_p(p);
  std::vector<Matrix> vs;
  vs.reserve(static_cast<std::size_t>(v_trials));
  for (int t = 0; t < v_trials; ++t) vs.push_back(gaussian_matrix(k, d, rng));
  for (int s = 0; s < sketch_draws; ++s) {
    PStableSketch sk = p_stable_sketch(r, n, p, rng);
    const Matrix su = sk.matrix * u;
    const Matrix sa = sk.matrix * a;
    bool all_ok = true;
    for (const Matrix& v : vs) {
      const double sketched = median_sketch_cost(su * v - sa, mp, p);
      const double truth = entrywise_norm(u * v - a, p);
      if (sketched < lower_frac * truth) {
        all_ok = false;
        break;
      }
    }
    if (all_ok) ++out.passes;
  }
  return out;
}

CheckOutcome top_quantile_dilation_check(double p, SeededRng& rng, double eps, Index n,
                                         Index d, Index r, int draws, int required) {
  CheckOutcome out{"top_quantile_dilation", 0, draws, required};
  const Matrix m = gaussian_matrix(n, d, rng);
  const double norm = entrywise_norm(m, p);
  const MedPConstant mp = med_p(p);
  const double bound = (10.0 / eps) * norm;
  for (int t = 0; t < draws; ++t) {
    PStableSketch s = p_stable_sketch(r, n, p, rng);
    const Matrix sm = s.matrix * m;
    double acc = 0.0;
    for (Index j = 0; j < sm.cols(); ++j) {
      Vector col = sm.col(j);
      acc += std::pow(quantile_abs(col, 1.0 - eps / 2.0), p);
    }
    const double est = std::pow(acc, 1.0 / p) / mp.value;
    if (est <= bound) ++out.passes;
  }
  return out;
}

CheckOutcome lp_distortion_check(double p, SeededRng& rng, Index n, Index d, Index r,
                                 int draws, int required) {
  CheckOutcome out{"lp_norm_distortion", 0, draws, required};
  const Matrix m = gaussian_matrix(n, d, rng);
  const double norm_pow = entrywise_norm_pow(m, p);
  const double bound =
      20.0 * static_cast<double>(r) * std::log(static_cast<double>(d) + 1.0) * norm_pow;
  for (int t = 0; t < draws; ++t) {
    PStableSketch s = p_stable_sketch(r, n, p, rng);
    if (entrywise_norm_pow(s.matrix * m, p) <= bound) ++out.passes;
  }
  return out;
}

CheckOutcome medp_continuity_check(double step, double tol) {
  CheckOutcome out{"medp_continuity", 0, 0, 0};
  for (double p = 1.0; p < 2.0 - 1e-12; p += 0.1) {
    ++out.trials;
    ++out.required;
    const double a = med_p(p).value;
    const double b = med_p(std::min(2.0, p + step)).value;
    if (std::abs(a - b) <= tol) ++out.passes;
  }
  return out;
}

std::vector<CheckOutcome> run_all_sketch_checks(double p, SeededRng& rng) {
  std::vector<CheckOutcome> all;
  all.push_back(median_preserves_norms_check(p, rng));
  all.push_back(one_sided_embedding_check(p, rng));
  all.push_back(top_quantile_dilation_check(p, rng));
  all.push_back(lp_distortion_check(p, rng));
  all.push_back(medp_continuity_check());
  return all;
}

}  // namespace lpra
