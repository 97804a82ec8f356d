#include "lpra/oracle.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "lpra/io.hpp"
#include "lpra/parallel.hpp"
#include "lpra/simplex.hpp"
#include "lpra/solvers.hpp"

namespace lpra {

Matrix gaussian_matrix(Index rows, Index cols, SeededRng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

PlantedInstance planted_instance(Index n, Index d, Index k, double noise_scale, double p,
                                 SeededRng& rng) {
  if (noise_scale < 0) throw InvalidInput("planted_instance: noise_scale must be >= 0");
  PlantedInstance inst;
  inst.seed = rng.seed();
  inst.k = k;
  inst.p = p;
  inst.u_star = gaussian_matrix(n, k, rng);
  inst.v_star = gaussian_matrix(k, d, rng);
  Matrix signal = inst.u_star * inst.v_star;
  inst.a = signal;
  if (noise_scale > 0.0) {
    Matrix noise = gaussian_matrix(n, d, rng);
    const double target = noise_scale * entrywise_norm(signal, p);
    noise *= target / entrywise_norm(noise, p);
    inst.a += noise;
    inst.noise_norm_p = target;
  }
  return inst;
}

HardInstance hard_instance(Index k, Index n, SeededRng& rng) {
  HardInstance h;
  h.k = k;
  h.n = n;
  h.seed = rng.seed();
  h.m = Matrix::Zero(k + n, n);
  h.m.topRows(k) = gaussian_matrix(k, n, rng);
  h.m.bottomRows(n) = Matrix::Identity(n, n);
  return h;
}

void truncated_svd(const Matrix& a, Index k, Matrix* left, Matrix* right) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index take = std::min(k, svd.singularValues().size());
  *left = Matrix::Zero(a.rows(), k);
  *right = Matrix::Zero(k, a.cols());
  for (Index i = 0; i < take; ++i) {
    left->col(i) = svd.matrixU().col(i) * svd.singularValues()(i);
    right->row(i) = svd.matrixV().col(i).transpose();
  }
}

double svd_baseline(const Matrix& a, Index k, double p) {
  Matrix left, right;
  truncated_svd(a, k, &left, &right);
  return entrywise_norm(a - left * right, p);
}

namespace {

double alternating_min(const Matrix& a, Index k, double p, const Matrix& v_init) {
  Matrix v = v_init;
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int iter = 0; iter < 100; ++iter) {
    Matrix u = best_left_factor(v, a, p);
    MultiRegressionResult fit = multi_response_regression(u, a, p);
    v = fit.x;
    const double err = entrywise_norm(a - u * v, p);
    if (err < best * (1.0 - 1e-10)) {
      best = err;
      stalled = 0;
    } else {
      best = std::min(best, err);
      if (++stalled >= 3) break;
    }
  }
  return best;
}

// Exact rank-(d-1) error for p = 1: fix the coordinate of x attaining
// ||x||_inf = 1 and minimize ||Ax||_1 over the box via an LP, for every
// coordinate and sign.
double dual_path_l1(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  const int d = static_cast<int>(a.cols());
  double best = std::numeric_limits<double>::infinity();
  for (int fix = 0; fix < d; ++fix) {
    for (int sign = -1; sign <= 1; sign += 2) {
      // Variables: x+ (d), x- (d), u (n), v (n), box slacks s (d).
      // Rows: A x+ - A x- + u - v = 0;  x+ + x- + s = 1 (=> |x| <= 1);
      //       x+_fix - x-_fix = sign.
      const int nv = 2 * d + 2 * n + d;
      const int nr = n + d + 1;
      Matrix lp_a = Matrix::Zero(nr, nv);
      Vector lp_b = Vector::Zero(nr);
      lp_a.block(0, 0, n, d) = a;
      lp_a.block(0, d, n, d) = -a;
      for (int i = 0; i < n; ++i) {
        lp_a(i, 2 * d + i) = 1.0;
        lp_a(i, 2 * d + n + i) = -1.0;
      }
      for (int j = 0; j < d; ++j) {
        lp_a(n + j, j) = 1.0;
        lp_a(n + j, d + j) = 1.0;
        lp_a(n + j, 2 * d + 2 * n + j) = 1.0;
        lp_b(n + j) = 1.0;
      }
      lp_a(n + d, fix) = 1.0;
      lp_a(n + d, d + fix) = -1.0;
      lp_b(n + d) = static_cast<double>(sign);
      Vector c = Vector::Zero(nv);
      c.segment(2 * d, 2 * n).setOnes();
      LpSolution sol = simplex_solve(lp_a, lp_b, c);
      if (sol.status == LpStatus::kOptimal) best = std::min(best, sol.objective);
    }
  }
  return best;
}

// min ||Ax||_p / ||x||_{p*} by normalized gradient descent; scale invariant,
// so each step renormalizes onto the dual sphere. The dual exponent p* lies
// in (2, inf), outside the validated [1,2] helpers.
double dual_path_gradient(const Matrix& a, double p, int restarts, SeededRng& rng) {
  const Index d = a.cols();
  const double pstar = p / (p - 1.0);
  const double eps = 1e-9;
  auto dual_norm = [&](const Vector& v) {
    double s = 0.0;
    for (Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), pstar);
    return std::pow(s, 1.0 / pstar);
  };
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Vector x = gaussian_matrix(d, 1, rng).col(0);
    x /= dual_norm(x);
    double step = 0.1;
    double cur = lp_norm(a * x, p);
    for (int it = 0; it < 300; ++it) {
      Vector res = a * x;
      Vector grad = Vector::Zero(d);
      for (Index i = 0; i < a.rows(); ++i) {
        const double w = std::pow(res(i) * res(i) + eps * eps, p * 0.5 - 1.0) * res(i);
        grad += w * a.row(i).transpose();
      }
      Vector cand = x - step * grad / std::max(grad.norm(), 1e-30);
      const double nn = dual_norm(cand);
      if (nn < 1e-12) break;
      cand /= nn;
      const double val = lp_norm(a * cand, p);
      if (val < cur) {
        x = cand;
        cur = val;
      } else {
        step *= 0.5;
        if (step < 1e-10) break;
      }
    }
    best = std::min(best, cur);
  }
  return best;
}

}  // namespace

double brute_force_opt(const Matrix& a, Index k, double p, int restarts, SeededRng& rng) {
  require_finite(a, "brute_force_opt");
  if (k < 0) throw InvalidInput("brute_force_opt: k must be >= 0");
  if (k == 0) return entrywise_norm(a, p);
  if (k >= std::min(a.rows(), a.cols())) return 0.0;

  // SVD initialization first, then random right factors.
  std::vector<Matrix> inits;
  inits.reserve(static_cast<std::size_t>(restarts));
  Matrix left, right;
  truncated_svd(a, k, &left, &right);
  inits.push_back(right);
  for (int t = 1; t < restarts; ++t) inits.push_back(gaussian_matrix(k, a.cols(), rng));

  std::vector<double> errs(inits.size(), std::numeric_limits<double>::infinity());
  parallel_for(inits.size(), [&](std::size_t i) {
    errs[i] = alternating_min(a, k, p, inits[i]);
  }, 1);
  double best = *std::min_element(errs.begin(), errs.end());

  if (k == a.cols() - 1) {
    if (p == 1.0) {
      best = std::min(best, dual_path_l1(a));
    } else if (p < 2.0) {
      SeededRng sub = rng.fork("dual-path");
      best = std::min(best, dual_path_gradient(a, p, restarts, sub));
    }
  }
  return best;
}

void save_planted_instance(const PlantedInstance& inst, const std::string& matrix_path,
                           const std::string& sidecar_path) {
  write_matrix_market(inst.a, matrix_path);
  nlohmann::ordered_json j;
  j["seed"] = inst.seed;
  j["k"] = inst.k;
  j["p"] = inst.p;
  j["noise_norm_p"] = inst.noise_norm_p;
  std::ofstream out(sidecar_path);
  if (!out) throw InvalidInput(sidecar_path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

PlantedInstance load_planted_instance(const std::string& matrix_path,
                                      const std::string& sidecar_path) {
  PlantedInstance inst;
  inst.a = read_matrix_market(matrix_path);
  std::ifstream in(sidecar_path);
  if (!in) throw InvalidInput(sidecar_path + ": cannot open");
  nlohmann::json j;
  in >> j;
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.k = j.at("k").get<Index>();
  inst.p = j.at("p").get<double>();
  inst.noise_norm_p = j.at("noise_norm_p").get<double>();
  return inst;
}

}  // namespace lpra
