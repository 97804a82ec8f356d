#include "lpra/lewis.hpp"

#include <cmath>

#include <Eigen/QR>

namespace lpra {

Vector leverage_scores(const Matrix& a) {
  const Index n = a.rows();
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const Index rank = qr.rank();
  if (rank == 0) return Vector::Zero(n);
  // Thin Q restricted to the numerical rank; row norms give the scores.
  Matrix q = qr.householderQ() * Matrix::Identity(n, rank);
  return q.rowwise().squaredNorm();
}

LewisWeights lewis_weights(const Matrix& a, double p, int max_iters, double tol) {
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidInput("lewis_weights: p must lie in [1,2]");
  require_finite(a, "lewis_weights");
  const Index n = a.rows();
  const Index d = a.cols();
  if (n == 0 || d == 0) throw InvalidInput("lewis_weights: empty matrix");

  LewisWeights out;
  out.p = p;
  const double exponent = 0.5 - 1.0 / p;  // row rescale power; 0 at p = 2

  Vector w = Vector::Constant(n, std::min(1.0, static_cast<double>(d) / n));
  auto tau_of = [&](const Vector& weights) {
    Matrix scaled(n, d);
    for (Index i = 0; i < n; ++i) {
      scaled.row(i) = std::pow(std::max(weights(i), 1e-300), exponent) * a.row(i);
    }
    return leverage_scores(scaled);
  };

  out.converged = false;
  for (int iter = 0; iter < max_iters; ++iter) {
    Vector tau = tau_of(w);
    out.fixed_point_residual = (tau - w).cwiseAbs().maxCoeff();
    out.residual_history.push_back(out.fixed_point_residual);
    if (out.fixed_point_residual <= tol) {
      out.converged = true;
      break;
    }
    Vector next(n);
    for (Index i = 0; i < n; ++i) {
      const double wi = std::max(w(i), 1e-300);
      next(i) = std::pow(std::pow(wi, 2.0 / p - 1.0) * tau(i), p / 2.0);
    }
    w = next;
  }
  out.weights = w;
  return out;
}

SamplingMatrix sampling_matrix(const LewisWeights& w, Index r, SeededRng& rng) {
  if (r < 1) throw InvalidInput("sampling_matrix: r must be >= 1");
  const double total = w.weights.sum();
  if (!(total > 0.0)) throw InvalidInput("sampling_matrix: all-zero weights");
  const Index n = w.weights.size();

  Vector cumulative(n);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    acc += w.weights(i) / total;
    cumulative(i) = acc;
  }
  cumulative(n - 1) = 1.0;

  SamplingMatrix s;
  s.source_rows_count = n;
  s.p = w.p;
  s.entries.reserve(static_cast<std::size_t>(r));
  for (Index t = 0; t < r; ++t) {
    const double u = rng.uniform();
    Index lo = 0, hi = n - 1;
    while (lo < hi) {
      const Index mid = (lo + hi) / 2;
      if (cumulative(mid) > u) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    const double pi = w.weights(lo) / total;
    const double scale = std::pow(1.0 / (static_cast<double>(r) * pi), 1.0 / w.p);
    s.entries.push_back({lo, scale});
  }
  return s;
}

Matrix apply_sampling(const SamplingMatrix& s, const Matrix& a) {
  if (a.rows() != s.source_rows_count) throw InvalidInput("apply_sampling: row mismatch");
  Matrix out(static_cast<Index>(s.entries.size()), a.cols());
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    out.row(static_cast<Index>(i)) = s.entries[i].scale * a.row(s.entries[i].source_row);
  }
  return out;
}

Index lewis_sample_count(Index t, double p, double c0) {
  const double td = static_cast<double>(std::max<Index>(t, 1));
  double count = c0 * td * std::log(td + 2.0);
  if (p > 1.0 && p < 2.0) {
    const double ll = std::log(std::log(td + 2.0) + 2.0);
    count *= ll * ll;
  }
  return static_cast<Index>(std::ceil(count));
}

}  // namespace lpra
