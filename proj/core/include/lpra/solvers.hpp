#pragma once

#include <optional>
#include <vector>

#include "lpra/matrix.hpp"

namespace lpra {

struct RegressionResult {
  Vector coefficients;
  double residual_p = 0.0;
  bool converged = true;
  int iterations = 0;
};

/// min_x ||Ux - b||_p for p in [1,2]. p = 1 is solved exactly as an LP;
/// 1 < p <= 2 by iteratively reweighted least squares with clamped weights
/// (p = 2 converges in one step). An all-zero or empty U is not an error:
/// the coefficients are zero and the residual is ||b||_p.
RegressionResult lp_regression(const Matrix& U, const Vector& b, double p);

struct MultiRegressionResult {
  Matrix x;             // r x d coefficient matrix
  Vector costs;         // per-column residual_p (the norm, not its p-th power)
  bool all_converged = true;
};

/// Column-wise lp_regression of B's columns onto U.
MultiRegressionResult multi_response_regression(const Matrix& U, const Matrix& B, double p);

struct MedianConstrainedSolution {
  Vector v;
  double norm_p = 0.0;
  double med_over_medp = 0.0;  // med(|Mv - s|)/med_p, recomputed
};

/// min ||v||_p subject to med(|Mv - s|)/med_p <= c, where med is the
/// ceil(r/2)-th smallest absolute value. "med <= bound" holds iff at least
/// ceil(r/2) coordinates are within the bound, so the solve enumerates all
/// coordinate subsets of that size and keeps the best feasible program
/// (an LP for p = 1, a barrier-solved convex program for p in (1,2)).
/// Returns nullopt when every subset is infeasible.
///
/// medp_value is the med_p constant for this p (see lpra/sketch.hpp).
/// Throws BudgetExceeded when rows(M) > subset_cap.
std::optional<MedianConstrainedSolution> min_norm_with_median_constraint(
    const Matrix& M, const Vector& s, double c, double p, double medp_value,
    int subset_cap = 14);

/// argmin_U ||UV - A||_p, solved row-wise. With a constraint basis R the
/// returned factor is R*U0 with U0 = argmin ||R U0 V - A||_p, so every output
/// column lies in span(R). V = 0 returns the zero factor by convention.
Matrix best_left_factor(const Matrix& V, const Matrix& A, double p,
                        const std::optional<Matrix>& constraint_basis = std::nullopt);

}  // namespace lpra
