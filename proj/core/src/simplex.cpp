#include "lpra/simplex.hpp"

#include <cmath>
#include <limits>

namespace lpra {

namespace {

constexpr double kEps = 1e-9;

// Dense tableau state. Rows 0..m-1 hold the constraints, row m the reduced
// costs with the (negated) objective in the last column.
struct Tableau {
  Matrix t;                 // (m+1) x (n+1)
  std::vector<int> basis;   // size m
  int m = 0;
  int n = 0;
  int pivots = 0;
  int degenerate_run = 0;
  bool bland = false;

  double objective() const { return -t(m, n); }

  void pivot(int row, int col) {
    const double piv = t(row, col);
    t.row(row) /= piv;
    for (int i = 0; i <= m; ++i) {
      if (i == row) continue;
      const double f = t(i, col);
      if (f != 0.0) t.row(i) -= f * t.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
    ++pivots;
  }

  // Returns entering column or -1 at optimality. `limit` restricts the
  // eligible columns (phase 1 allows artificials, phase 2 does not).
  int choose_entering(int limit) const {
    if (bland) {
      for (int j = 0; j < limit; ++j) {
        if (t(m, j) < -kEps) return j;
      }
      return -1;
    }
    int best = -1;
    double best_val = -kEps;
    for (int j = 0; j < limit; ++j) {
      if (t(m, j) < best_val) {
        best_val = t(m, j);
        best = j;
      }
    }
    return best;
  }

  // Lowest-ratio row; ties broken by lowest basic variable index.
  int choose_leaving(int col) const {
    int row = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = t(i, col);
      if (a > kEps) {
        const double ratio = t(i, n) / a;
        if (ratio < best_ratio - kEps ||
            (ratio < best_ratio + kEps &&
             (row == -1 || basis[static_cast<std::size_t>(i)] <
                               basis[static_cast<std::size_t>(row)]))) {
          best_ratio = ratio;
          row = i;
        }
      }
    }
    return row;
  }

  LpStatus run(int limit, int max_pivots) {
    while (pivots < max_pivots) {
      const int col = choose_entering(limit);
      if (col < 0) return LpStatus::kOptimal;
      const int row = choose_leaving(col);
      if (row < 0) return LpStatus::kUnbounded;
      const double before = objective();
      pivot(row, col);
      if (objective() < before - kEps * (1.0 + std::abs(before))) {
        degenerate_run = 0;
        bland = false;
      } else if (++degenerate_run > 40 + m) {
        bland = true;
      }
    }
    return LpStatus::kIterLimit;
  }
};

int default_pivot_cap(int m, int n) { return 400 + 60 * (m + n); }

}  // namespace

LpSolution simplex_solve(const Matrix& A, const Vector& b, const Vector& c,
                         const std::vector<int>* initial_basis, int max_pivots) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n) throw InvalidInput("simplex_solve: dimension mismatch");
  if (max_pivots <= 0) max_pivots = default_pivot_cap(m, n);

  LpSolution sol;

  if (initial_basis != nullptr) {
    Tableau tab;
    tab.m = m;
    tab.n = n;
    tab.basis = *initial_basis;
    tab.t = Matrix::Zero(m + 1, n + 1);
    tab.t.topLeftCorner(m, n) = A;
    tab.t.col(n).head(m) = b;
    for (int i = 0; i < m; ++i) {
      if (tab.t(i, n) < 0) tab.t.row(i) = -tab.t.row(i);
    }
    tab.t.row(m).head(n) = c.transpose();
    // Reduce the cost row against the starting basis.
    for (int i = 0; i < m; ++i) {
      const int bv = tab.basis[static_cast<std::size_t>(i)];
      const double piv = tab.t(i, bv);
      if (std::abs(piv - 1.0) > kEps) tab.t.row(i) /= piv;
      const double f = tab.t(m, bv);
      if (f != 0.0) tab.t.row(m) -= f * tab.t.row(i);
    }
    const LpStatus st = tab.run(n, max_pivots);
    sol.status = st;
    sol.pivots = tab.pivots;
    sol.x = Vector::Zero(n);
    for (int i = 0; i < m; ++i) sol.x(tab.basis[static_cast<std::size_t>(i)]) = tab.t(i, n);
    sol.objective = c.dot(sol.x);
    return sol;
  }

  // Phase 1 with artificials.
  Tableau tab;
  tab.m = m;
  tab.n = n + m;
  tab.t = Matrix::Zero(m + 1, n + m + 1);
  tab.t.topLeftCorner(m, n) = A;
  tab.t.col(n + m).head(m) = b;
  for (int i = 0; i < m; ++i) {
    if (tab.t(i, n + m) < 0) tab.t.row(i).head(n) = -tab.t.row(i).head(n),
                             tab.t(i, n + m) = -tab.t(i, n + m);
    tab.t(i, n + i) = 1.0;
  }
  tab.basis.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) tab.basis[static_cast<std::size_t>(i)] = n + i;
  // Phase-1 reduced costs: minimize the artificial sum.
  for (int i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
  tab.t.row(m).segment(n, m).setZero();

  LpStatus st = tab.run(n + m, max_pivots);
  if (st == LpStatus::kIterLimit) {
    sol.status = st;
    sol.pivots = tab.pivots;
    return sol;
  }
  const double scale = 1.0 + b.cwiseAbs().sum();
  if (tab.objective() > 1e-7 * scale) {
    sol.status = LpStatus::kInfeasible;
    sol.pivots = tab.pivots;
    return sol;
  }

  // Drive remaining artificials out of the basis (rows are degenerate here;
  // pivoting on any nonzero original entry keeps feasibility).
  for (int i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] >= n) {
      int col = -1;
      for (int j = 0; j < n; ++j) {
        if (std::abs(tab.t(i, j)) > 1e-7) {
          col = j;
          break;
        }
      }
      if (col >= 0) tab.pivot(i, col);
      // A fully zero row is a redundant constraint; its artificial stays
      // basic at zero and is blocked from re-entering below.
    }
  }

  // Phase 2: rebuild the cost row for the true objective.
  tab.t.row(m).setZero();
  tab.t.row(m).head(n) = c.transpose();
  for (int i = 0; i < m; ++i) {
    const int bv = tab.basis[static_cast<std::size_t>(i)];
    if (bv < n) {
      const double f = tab.t(m, bv);
      if (f != 0.0) tab.t.row(m) -= f * tab.t.row(i);
    }
  }
  tab.degenerate_run = 0;
  tab.bland = false;
  st = tab.run(n, max_pivots);

  sol.status = st;
  sol.pivots = tab.pivots;
  sol.x = Vector::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int bv = tab.basis[static_cast<std::size_t>(i)];
    if (bv < n) sol.x(bv) = tab.t(i, n + m);
  }
  sol.objective = c.dot(sol.x);
  return sol;
}

L1FitResult l1_regression_exact(const Matrix& U, const Vector& b, int max_pivots) {
  const int m = static_cast<int>(U.rows());
  const int r = static_cast<int>(U.cols());
  if (b.size() != m) throw InvalidInput("l1_regression_exact: dimension mismatch");

  // Variables: x+ (r), x- (r), u (m), v (m);  U x+ - U x- + u - v = b.
  const int n = 2 * r + 2 * m;
  Matrix A = Matrix::Zero(m, n);
  A.block(0, 0, m, r) = U;
  A.block(0, r, m, r) = -U;
  for (int i = 0; i < m; ++i) {
    A(i, 2 * r + i) = 1.0;
    A(i, 2 * r + m + i) = -1.0;
  }
  Vector c = Vector::Zero(n);
  c.segment(2 * r, 2 * m).setOnes();

  // At x = 0 the residual variables themselves form a feasible basis.
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    basis[static_cast<std::size_t>(i)] = b(i) >= 0 ? 2 * r + i : 2 * r + m + i;
  }

  LpSolution lp = simplex_solve(A, b, c, &basis, max_pivots);
  L1FitResult out;
  out.pivots = lp.pivots;
  out.converged = lp.status == LpStatus::kOptimal;
  out.x = lp.x.segment(0, r) - lp.x.segment(r, r);
  Vector res = U * out.x - b;
  out.residual_l1 = res.cwiseAbs().sum();
  return out;
}

}  // namespace lpra
