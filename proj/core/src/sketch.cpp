#include "lpra/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace lpra {

double sample_p_stable(double p, SeededRng& rng) {
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidInput("sample_p_stable: p must lie in [1,2]");
  const double theta = 3.14159265358979323846 * (rng.uniform_open() - 0.5);
  if (p == 1.0) return std::tan(theta);
  const double w = rng.exponential();
  const double a = std::sin(p * theta) / std::pow(std::cos(theta), 1.0 / p);
  const double b = std::pow(std::cos((p - 1.0) * theta) / w, (1.0 - p) / p);
  return a * b;
}

PStableSketch p_stable_sketch(Index rows, Index cols, double p, SeededRng& rng) {
  PStableSketch s;
  s.p = p;
  s.seed = rng.seed();
  s.matrix = Matrix(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      s.matrix(i, j) = sample_p_stable(p, rng);
    }
  }
  return s;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Zolotarev integrand e^{-m^q V(theta; p)} with q = p/(p-1), evaluated in log
// space to survive the theta -> 0 blowup of V.
double stable_cdf_integrand(double theta, double p, double log_m_q) {
  const double q = p / (p - 1.0);
  const double log_v = q * (std::log(std::cos(theta)) - std::log(std::sin(p * theta))) +
                       std::log(std::cos((p - 1.0) * theta)) - std::log(std::cos(theta));
  const double exponent = log_m_q + log_v;
  if (exponent > 700.0) return 0.0;
  return std::exp(-std::exp(exponent));
}

// Composite Simpson over [delta, pi/2 - delta] with n intervals (n even).
double simpson(double p, double log_m_q, int n) {
  const double delta = 1e-6;
  const double a = delta;
  const double b = kPi / 2.0 - delta;
  const double h = (b - a) / n;
  double s = stable_cdf_integrand(a, p, log_m_q) + stable_cdf_integrand(b, p, log_m_q);
  for (int i = 1; i < n; ++i) {
    const double x = a + h * i;
    s += stable_cdf_integrand(x, p, log_m_q) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

// Integral of the integrand over (0, pi/2), refined until stable to 1e-6.
double stable_integral(double p, double m, int* points_used, int base_points = 64) {
  const double q = p / (p - 1.0);
  const double log_m_q = q * std::log(m);
  int n = base_points;
  double prev = simpson(p, log_m_q, n);
  while (n < (1 << 17)) {
    n *= 2;
    const double cur = simpson(p, log_m_q, n);
    if (std::abs(cur - prev) < 1e-6) {
      *points_used = n;
      return cur;
    }
    prev = cur;
  }
  throw std::runtime_error("med_p: quadrature did not stabilize to 1e-6 at p=" +
                           std::to_string(p) + ", m=" + std::to_string(m) +
                           ", last n=" + std::to_string(n));
}

MedPConstant compute_med_p(double p, int base_points) {
  MedPConstant out;
  out.p = p;
  if (p == 1.0) {
    out.value = 1.0;  // median of a half-Cauchy
    return out;
  }
  // P(|Z| <= m) = 1/2  <=>  integral over theta equals pi/4.
  const double target = kPi / 4.0;
  double lo = 0.05, hi = 4.0;
  int pts = 0;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    const double integral = stable_integral(p, mid, &pts, base_points);
    if (integral > target) {
      lo = mid;  // CDF still below 3/4: median is larger
    } else {
      hi = mid;
    }
  }
  out.value = 0.5 * (lo + hi);
  out.quadrature_points = pts;
  return out;
}

}  // namespace

MedPConstant med_p(double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidInput("med_p: p must lie in [1,2]");
  static std::mutex mu;
  static std::map<double, MedPConstant> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  MedPConstant v = compute_med_p(p, 64);
  cache.emplace(p, v);
  return v;
}

MedPConstant med_p_at_resolution(double p, int base_points) {
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidInput("med_p: p must lie in [1,2]");
  return compute_med_p(p, base_points);
}

double quantile_abs(const Vector& v, double alpha) {
  if (v.size() == 0) throw InvalidInput("quantile_abs: empty vector");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("quantile_abs: alpha must be in (0,1]");
  const Index n = v.size();
  Index h = static_cast<Index>(std::ceil(alpha * static_cast<double>(n)));
  h = std::max<Index>(1, std::min(h, n));
  std::vector<double> a(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = std::abs(v(i));
  std::nth_element(a.begin(), a.begin() + (h - 1), a.end());
  return a[static_cast<std::size_t>(h - 1)];
}

double median_abs(const Vector& v) { return quantile_abs(v, 0.5); }

double median_sketch_cost(const Matrix& m, const MedPConstant& medp, double p) {
  double s = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    Vector col = m.col(j);
    s += std::pow(median_abs(col), p);
  }
  return std::pow(s, 1.0 / p) / medp.value;
}

}  // namespace lpra
