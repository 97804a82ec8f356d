#include "lpra/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "lpra/parallel.hpp"
#include "lpra/simplex.hpp"

namespace lpra {

namespace {

constexpr int kIrlsMaxIter = 500;
constexpr double kIrlsRelTol = 1e-9;

bool effectively_zero(const Matrix& m) {
  return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0;
}

RegressionResult irls_regression(const Matrix& U, const Vector& b, double p) {
  RegressionResult out;
  const Index n = U.rows();
  const double scale = std::max(b.cwiseAbs().maxCoeff(), U.cwiseAbs().maxCoeff());
  const double eps_smooth = 1e-8 * std::max(scale, 1e-30);

  Vector x = U.colPivHouseholderQr().solve(b);
  Vector res = U * x - b;
  double obj = lp_norm_pow(res, p);
  Vector best_x = x;
  double best_obj = obj;

  if (p == 2.0) {
    out.coefficients = x;
    out.residual_p = std::sqrt(obj);
    out.iterations = 1;
    return out;
  }

  out.converged = false;
  int iter = 1;
  for (; iter < kIrlsMaxIter; ++iter) {
    Vector w(n);
    for (Index i = 0; i < n; ++i) {
      w(i) = std::pow(std::max(std::abs(res(i)), eps_smooth), (p - 2.0) * 0.5);
    }
    Matrix wu = w.asDiagonal() * U;
    Vector wb = w.asDiagonal() * b;
    x = wu.colPivHouseholderQr().solve(wb);
    res = U * x - b;
    const double new_obj = lp_norm_pow(res, p);
    if (new_obj < best_obj) {
      best_obj = new_obj;
      best_x = x;
    }
    if (std::abs(new_obj - obj) < kIrlsRelTol * std::max(1.0, obj)) {
      obj = new_obj;
      out.converged = true;
      break;
    }
    obj = new_obj;
  }
  out.coefficients = best_x;
  out.residual_p = std::pow(best_obj, 1.0 / p);
  out.iterations = iter + 1;
  return out;
}

}  // namespace

RegressionResult lp_regression(const Matrix& U, const Vector& b, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidInput("lp_regression: p must lie in [1,2]");
  require_finite(b, "lp_regression b");
  if (U.size() > 0) require_finite(U, "lp_regression U");
  if (U.rows() != b.size()) throw InvalidInput("lp_regression: dimension mismatch");

  RegressionResult out;
  if (U.cols() == 0 || effectively_zero(U)) {
    out.coefficients = Vector::Zero(U.cols());
    out.residual_p = lp_norm(b, p);
    out.iterations = 0;
    return out;
  }
  if (p == 1.0) {
    L1FitResult fit = l1_regression_exact(U, b);
    out.coefficients = fit.x;
    out.residual_p = fit.residual_l1;
    out.converged = fit.converged;
    out.iterations = fit.pivots;
    return out;
  }
  return irls_regression(U, b, p);
}

MultiRegressionResult multi_response_regression(const Matrix& U, const Matrix& B, double p) {
  if (U.rows() != B.rows()) throw InvalidInput("multi_response_regression: row mismatch");
  const Index d = B.cols();
  MultiRegressionResult out;
  out.x = Matrix::Zero(U.cols(), d);
  out.costs = Vector::Zero(d);
  std::vector<char> conv(static_cast<std::size_t>(d), 1);
  parallel_for(static_cast<std::size_t>(d), [&](std::size_t j) {
    RegressionResult r = lp_regression(U, B.col(static_cast<Index>(j)), p);
    if (r.coefficients.size() > 0) out.x.col(static_cast<Index>(j)) = r.coefficients;
    out.costs(static_cast<Index>(j)) = r.residual_p;
    conv[j] = r.converged ? 1 : 0;
  });
  out.all_converged = std::all_of(conv.begin(), conv.end(), [](char c) { return c != 0; });
  return out;
}

namespace {

double median_abs_over(const Vector& w, Index h) {
  std::vector<double> a(w.size());
  for (Index i = 0; i < w.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(w(i));
  std::nth_element(a.begin(), a.begin() + (h - 1), a.end());
  return a[static_cast<std::size_t>(h - 1)];
}

// min ||v||_1 s.t. |M_T v - s_T| <= cb componentwise; exact LP.
std::optional<Vector> subset_min_l1(const Matrix& MT, const Vector& sT, double cb) {
  const int h = static_cast<int>(MT.rows());
  const int k = static_cast<int>(MT.cols());
  const int n = 2 * k + 2 * h;
  Matrix A = Matrix::Zero(2 * h, n);
  Vector b(2 * h);
  A.block(0, 0, h, k) = MT;
  A.block(0, k, h, k) = -MT;
  A.block(h, 0, h, k) = -MT;
  A.block(h, k, h, k) = MT;
  for (int j = 0; j < h; ++j) {
    A(j, 2 * k + j) = 1.0;
    A(h + j, 2 * k + h + j) = 1.0;
    b(j) = sT(j) + cb;
    b(h + j) = cb - sT(j);
  }
  Vector c = Vector::Zero(n);
  c.head(2 * k).setOnes();
  LpSolution lp = simplex_solve(A, b, c);
  if (lp.status != LpStatus::kOptimal) return std::nullopt;
  return Vector(lp.x.head(k) - lp.x.segment(k, k));
}

// Chebyshev fit min_v ||M_T v - s_T||_inf; always feasible.
std::pair<Vector, double> subset_chebyshev(const Matrix& MT, const Vector& sT) {
  const int h = static_cast<int>(MT.rows());
  const int k = static_cast<int>(MT.cols());
  // Variables: v+ (k), v- (k), t, slacks (2h).
  const int n = 2 * k + 1 + 2 * h;
  Matrix A = Matrix::Zero(2 * h, n);
  Vector b(2 * h);
  for (int j = 0; j < h; ++j) {
    A.row(j).head(k) = MT.row(j);
    A.row(j).segment(k, k) = -MT.row(j);
    A(j, 2 * k) = -1.0;
    A(j, 2 * k + 1 + j) = 1.0;
    b(j) = sT(j);
    A.row(h + j).head(k) = -MT.row(j);
    A.row(h + j).segment(k, k) = MT.row(j);
    A(h + j, 2 * k) = -1.0;
    A(h + j, 2 * k + 1 + h + j) = 1.0;
    b(h + j) = -sT(j);
  }
  Vector c = Vector::Zero(n);
  c(2 * k) = 1.0;
  LpSolution lp = simplex_solve(A, b, c);
  Vector v = lp.x.head(k) - lp.x.segment(k, k);
  double t = (MT * v - sT).cwiseAbs().maxCoeff();
  return {v, t};
}

double smoothed_lp_pow(const Vector& v, double p, double eps) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::pow(v(i) * v(i) + eps * eps, p * 0.5);
  return s;
}

// Barrier path-following for min ||v||_p (p in (1,2)) over the slab
// intersection |M_T v - s_T| <= cb, started from a strictly interior point.
Vector subset_min_lp_barrier(const Matrix& MT, const Vector& sT, double cb, double p,
                             Vector v) {
  const Index k = MT.cols();
  const Index h = MT.rows();
  const double eps = 1e-9 * std::max(1.0, sT.cwiseAbs().maxCoeff());
  double t = 1.0;
  const double mu = 8.0;
  for (int outer = 0; outer < 40; ++outer) {
    for (int it = 0; it < 60; ++it) {
      Vector w = MT * v - sT;
      Vector grad = Vector::Zero(k);
      Matrix hess = Matrix::Zero(k, k);
      for (Index i = 0; i < k; ++i) {
        const double q = v(i) * v(i) + eps * eps;
        grad(i) = t * p * v(i) * std::pow(q, p * 0.5 - 1.0);
        hess(i, i) = t * p * std::pow(q, p * 0.5 - 2.0) * ((p - 1.0) * v(i) * v(i) + eps * eps);
      }
      for (Index j = 0; j < h; ++j) {
        const double hi = cb - w(j);
        const double lo = w(j) + cb;
        grad += MT.row(j).transpose() * (1.0 / hi - 1.0 / lo);
        hess += MT.row(j).transpose() * MT.row(j) * (1.0 / (hi * hi) + 1.0 / (lo * lo));
      }
      hess.diagonal().array() += 1e-14 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
      Vector step = hess.ldlt().solve(-grad);
      const double decrement = -grad.dot(step);
      if (decrement < 1e-12 * (1.0 + t)) break;
      double alpha = 1.0;
      const double phi0 = t * smoothed_lp_pow(v, p, eps);
      auto barrier_val = [&](const Vector& vv) {
        Vector ww = MT * vv - sT;
        double val = t * smoothed_lp_pow(vv, p, eps);
        for (Index j = 0; j < h; ++j) {
          const double hi = cb - ww(j);
          const double lo = ww(j) + cb;
          if (hi <= 0 || lo <= 0) return std::numeric_limits<double>::infinity();
          val -= std::log(hi) + std::log(lo);
        }
        return val;
      };
      double cur = barrier_val(v);
      for (int ls = 0; ls < 60; ++ls) {
        Vector cand = v + alpha * step;
        if (barrier_val(cand) <= cur - 1e-4 * alpha * decrement) {
          v = cand;
          break;
        }
        alpha *= 0.5;
      }
      (void)phi0;
    }
    if (2.0 * static_cast<double>(h) / t < 1e-10 * (1.0 + smoothed_lp_pow(v, p, eps))) break;
    t *= mu;
  }
  return v;
}

}  // namespace

std::optional<MedianConstrainedSolution> min_norm_with_median_constraint(
    const Matrix& M, const Vector& s, double c, double p, double medp_value,
    int subset_cap) {
  if (c < 0) throw InvalidInput("min_norm_with_median_constraint: c must be >= 0");
  if (M.rows() != s.size()) throw InvalidInput("min_norm_with_median_constraint: dim mismatch");
  const Index r = M.rows();
  const Index k = M.cols();
  if (r < 1) throw InvalidInput("min_norm_with_median_constraint: r must be >= 1");
  if (r > subset_cap) {
    throw BudgetExceeded("min_norm_with_median_constraint: sketch rows " + std::to_string(r) +
                         " exceed the subset enumeration cap " + std::to_string(subset_cap));
  }
  const Index h = (r + 1) / 2;
  const double cb = c * medp_value;
  const double feas_slack = 1e-9 * (1.0 + cb);

  auto make_solution = [&](const Vector& v) {
    MedianConstrainedSolution sol;
    sol.v = v;
    sol.norm_p = lp_norm(v, p);
    sol.med_over_medp = median_abs_over(M * v - s, h) / medp_value;
    return sol;
  };

  // v = 0 is optimal whenever it is feasible (the norm cannot go below 0).
  if (median_abs_over(-s, h) <= cb + feas_slack) {
    return make_solution(Vector::Zero(k));
  }

  std::vector<Index> comb(static_cast<std::size_t>(h));
  for (Index i = 0; i < h; ++i) comb[static_cast<std::size_t>(i)] = i;
  std::optional<MedianConstrainedSolution> best;

  while (true) {
    Matrix MT(h, k);
    Vector sT(h);
    for (Index i = 0; i < h; ++i) {
      MT.row(i) = M.row(comb[static_cast<std::size_t>(i)]);
      sT(i) = s(comb[static_cast<std::size_t>(i)]);
    }

    std::optional<Vector> v;
    if (p == 1.0) {
      v = subset_min_l1(MT, sT, cb);
    } else {
      auto [v0, tstar] = subset_chebyshev(MT, sT);
      if (tstar <= cb + feas_slack) {
        if (tstar < cb * (1.0 - 1e-9)) {
          v = subset_min_lp_barrier(MT, sT, cb, p, v0);
        } else {
          v = v0;  // feasible set has (numerically) empty interior
        }
      }
    }
    if (v.has_value() && (MT * *v - sT).cwiseAbs().maxCoeff() <= cb + feas_slack) {
      MedianConstrainedSolution cand = make_solution(*v);
      if (!best.has_value() || cand.norm_p < best->norm_p) best = std::move(cand);
    }

    // Next h-combination of [r] in lexicographic order.
    Index i = h - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == r - h + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < h; ++j) {
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return best;
}

namespace {

// Joint IRLS for min_{U0} ||R U0 V - A||_p with the factor constrained to
// span(R). Each sweep solves the weighted normal equations over vec(U0).
Matrix constrained_left_factor(const Matrix& R, const Matrix& V, const Matrix& A, double p) {
  const Index n = A.rows();
  const Index d = A.cols();
  const Index t = R.cols();
  const Index k = V.rows();
  const Index tk = t * k;
  const double scale = std::max(1e-30, A.cwiseAbs().maxCoeff());
  const double eps_smooth = 1e-8 * scale;

  Matrix W = Matrix::Ones(n, d);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(tk);
  double prev_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x = x;
  double best_obj = prev_obj;

  for (int iter = 0; iter < 200; ++iter) {
    Matrix N = Matrix::Zero(tk, tk);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(tk);
    for (Index j = 0; j < d; ++j) {
      Matrix RtWR = R.transpose() * W.col(j).asDiagonal() * R;  // t x t
      Vector RtWa = R.transpose() * (W.col(j).cwiseProduct(A.col(j)));
      const Vector vj = V.col(j);
      for (Index b2 = 0; b2 < k; ++b2) {
        for (Index b1 = 0; b1 < k; ++b1) {
          N.block(t * b1, t * b2, t, t) += vj(b1) * vj(b2) * RtWR;
        }
        rhs.segment(t * b2, t) += vj(b2) * RtWa;
      }
    }
    N.diagonal().array() += 1e-12 * (1.0 + N.diagonal().cwiseAbs().maxCoeff());
    x = N.ldlt().solve(rhs);

    Matrix U0 = Eigen::Map<Eigen::MatrixXd>(x.data(), t, k);
    Matrix res = R * U0 * V - A;
    const double obj = entrywise_norm_pow(res, p);
    if (obj < best_obj) {
      best_obj = obj;
      best_x = x;
    }
    if (std::abs(obj - prev_obj) < kIrlsRelTol * std::max(1.0, prev_obj)) break;
    prev_obj = obj;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) {
        W(i, j) = std::pow(std::max(std::abs(res(i, j)), eps_smooth), p - 2.0);
      }
    }
  }
  Matrix U0 = Eigen::Map<Eigen::MatrixXd>(best_x.data(), t, k);
  return R * U0;
}

}  // namespace

Matrix best_left_factor(const Matrix& V, const Matrix& A, double p,
                        const std::optional<Matrix>& constraint_basis) {
  if (V.cols() != A.cols()) throw InvalidInput("best_left_factor: V.cols() != A.cols()");
  const Index n = A.rows();
  const Index k = V.rows();
  if (effectively_zero(V)) return Matrix::Zero(n, k);

  if (constraint_basis.has_value()) {
    const Matrix& R = *constraint_basis;
    if (R.rows() != n) throw InvalidInput("best_left_factor: constraint basis row mismatch");
    // A basis spanning all of R^n imposes no constraint.
    if (R.cols() < n || numerical_rank(R) < n) {
      return constrained_left_factor(R, V, A, p);
    }
  }

  Matrix U(n, k);
  Matrix Vt = V.transpose();
  std::vector<char> dummy(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    RegressionResult r = lp_regression(Vt, A.row(static_cast<Index>(i)).transpose(), p);
    U.row(static_cast<Index>(i)) = r.coefficients.transpose();
    dummy[i] = r.converged;
  });
  return U;
}

}  // namespace lpra
