#pragma once

#include <string>
#include <vector>

#include "lpra/matrix.hpp"
#include "lpra/rng.hpp"

namespace lpra {

struct CheckOutcome {
  std::string name;
  int passes = 0;
  int trials = 0;
  int required = 0;
  bool passed() const { return passes >= required; }
};

/// Empirical validations of the median-sketch toolkit; each runs a number of
/// independent sketch draws and counts how many land inside the stated
/// envelope. Used by both the sketch-check CLI command and the acceptance
/// suite.
CheckOutcome median_preserves_norms_check(double p, SeededRng& rng, Index n = 50,
                                          Index d = 20, Index r = 2000, int draws = 100,
                                          double rel_tol = 0.10, int required = 90);

CheckOutcome one_sided_embedding_check(double p, SeededRng& rng, Index n = 100,
                                       Index k = 2, Index d = 20, Index r = 3000,
                                       int sketch_draws = 10, int v_trials = 50,
                                       double lower_frac = 0.8, int required = 9);

CheckOutcome top_quantile_dilation_check(double p, SeededRng& rng, double eps = 0.2,
                                         Index n = 60, Index d = 15, Index r = 250,
                                         int draws = 10, int required = 9);

CheckOutcome lp_distortion_check(double p, SeededRng& rng, Index n = 60, Index d = 15,
                                 Index r = 50, int draws = 10, int required = 9);

CheckOutcome medp_continuity_check(double step = 1e-3, double tol = 1e-2);

std::vector<CheckOutcome> run_all_sketch_checks(double p, SeededRng& rng);

}  // namespace lpra
