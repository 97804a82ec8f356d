#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "lpra/oracle.hpp"
#include "lpra/rng.hpp"

using namespace lpra;

TEST_CASE("brute force on exact low rank") {
  SeededRng rng(301);
  Matrix u = gaussian_matrix(8, 2, rng);
  Matrix v = gaussian_matrix(2, 7, rng);
  Matrix a = u * v;
  SeededRng sub = rng.fork("oracle");
  CHECK(brute_force_opt(a, 2, 1.0, 5, sub) <= 1e-8 * entrywise_norm(a, 1.0));
  CHECK(brute_force_opt(a, 7, 1.0, 5, sub) == 0.0);
}

TEST_CASE("diag(10,1) rank-1 l1 optimum is 1") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 10.0;
  a(1, 1) = 1.0;
  SeededRng rng(302);
  const double opt = brute_force_opt(a, 1, 1.0, 10, rng);
  CHECK(opt == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("monotone in k and dominated by the svd baseline") {
  SeededRng rng(303);
  for (int t = 0; t < 10; ++t) {
    Matrix a = gaussian_matrix(7, 6, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (Index k = 1; k <= 3; ++k) {
      SeededRng sub = rng.fork(static_cast<std::uint64_t>(100 * t + k));
      const double opt = brute_force_opt(a, k, 1.0, 8, sub);
      CHECK(opt <= prev + 1e-9);
      CHECK(opt <= svd_baseline(a, k, 1.0) + 1e-9);
      prev = opt;
    }
  }
}

TEST_CASE("svd baseline within the norm-equivalence window of the oracle") {
  SeededRng rng(304);
  int within = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    const Index n = 6, d = 5;
    Matrix a = gaussian_matrix(n, d, rng);
    SeededRng sub = rng.fork(static_cast<std::uint64_t>(t));
    const double opt = brute_force_opt(a, 2, 1.0, 10, sub);
    const double svd = svd_baseline(a, 2, 1.0);
    CHECK(opt <= svd + 1e-9);
    const double window = std::pow(static_cast<double>(n * d), 1.0 / 1.0 - 0.5);
    if (svd <= 1.10 * window * opt) ++within;  // 10% slack for oracle looseness
  }
  CHECK(within == trials);
}

TEST_CASE("planted instance bookkeeping") {
  SeededRng rng(305);
  PlantedInstance inst = planted_instance(12, 9, 2, 0.2, 1.5, rng);
  const double recomputed = entrywise_norm(inst.a - inst.u_star * inst.v_star, 1.5);
  CHECK(recomputed == doctest::Approx(inst.noise_norm_p).epsilon(1e-9));

  SeededRng rng2(305);
  PlantedInstance again = planted_instance(12, 9, 2, 0.2, 1.5, rng2);
  CHECK((inst.a - again.a).cwiseAbs().maxCoeff() == 0.0);

  SeededRng rng3(306);
  PlantedInstance exact = planted_instance(10, 10, 3, 0.0, 1.0, rng3);
  CHECK(exact.noise_norm_p == 0.0);
  CHECK(numerical_rank(exact.a) == 3);
}

TEST_CASE("hard instance structure") {
  SeededRng rng(307);
  HardInstance h = hard_instance(5, 12, rng);
  CHECK(h.m.rows() == 17);
  CHECK(h.m.cols() == 12);
  CHECK((h.m.bottomRows(12) - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.opt_upper_bound_pth_power() == 12.0);

  // The witness: zero the identity block, keep the Gaussian block (rank <= 5).
  Matrix witness = Matrix::Zero(17, 12);
  witness.topRows(5) = h.m.topRows(5);
  CHECK(entrywise_norm_pow(h.m - witness, 1.0) == doctest::Approx(12.0));

  SeededRng rng2(307);
  HardInstance h2 = hard_instance(5, 12, rng2);
  CHECK((h.m - h2.m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("planted instance file round trip with sidecar") {
  SeededRng rng(308);
  PlantedInstance inst = planted_instance(6, 5, 1, 0.1, 1.0, rng);
  save_planted_instance(inst, "inst_test.mtx", "inst_test.json");
  PlantedInstance back = load_planted_instance("inst_test.mtx", "inst_test.json");
  CHECK((inst.a - back.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.seed == inst.seed);
  CHECK(back.k == inst.k);
  CHECK(back.noise_norm_p == inst.noise_norm_p);
  std::remove("inst_test.mtx");
  std::remove("inst_test.json");
}

TEST_CASE("dual path at p=1.5 does not break the oracle") {
  SeededRng rng(309);
  Matrix a = gaussian_matrix(6, 4, rng);
  SeededRng sub = rng.fork("o");
  const double opt = brute_force_opt(a, 3, 1.5, 8, sub);  // k = d-1 engages the dual path
  CHECK(opt >= 0.0);
  CHECK(opt <= svd_baseline(a, 3, 1.5) + 1e-9);
}
