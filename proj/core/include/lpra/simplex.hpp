#pragma once

#include <vector>

#include "lpra/matrix.hpp"

namespace lpra {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;          // standard-form variables
  double objective = 0.0;
  int pivots = 0;
};

/// Dense two-phase simplex for  min c'x  s.t.  Ax = b, x >= 0.
///
/// Pricing is Dantzig's rule; after a run of degenerate pivots it switches to
/// Bland's rule until the objective moves again, which prevents cycling.
/// Rows with negative b are sign-flipped internally. `initial_basis`, when
/// given, must name one variable per row forming a feasible basis (the
/// l1-regression driver below exploits this to skip phase 1).
LpSolution simplex_solve(const Matrix& A, const Vector& b, const Vector& c,
                         const std::vector<int>* initial_basis = nullptr,
                         int max_pivots = 0);

struct L1FitResult {
  Vector x;
  double residual_l1 = 0.0;
  bool converged = true;
  int pivots = 0;
};

/// Exact least-absolute-deviations fit  min_x ||Ux - b||_1  as an LP in
/// equality form (U x + u - v = b) started from the all-residual basis, so no
/// phase 1 is needed.
L1FitResult l1_regression_exact(const Matrix& U, const Vector& b, int max_pivots = 0);

}  // namespace lpra
