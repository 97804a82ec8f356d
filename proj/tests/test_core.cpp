#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "lpra/io.hpp"
#include "lpra/matrix.hpp"
#include "lpra/oracle.hpp"
#include "lpra/rng.hpp"

using namespace lpra;

TEST_CASE("entrywise norm basics") {
  Matrix zero = Matrix::Zero(3, 4);
  CHECK(entrywise_norm(zero, 1.0) == 0.0);
  CHECK(entrywise_norm(zero, 1.7) == 0.0);

  Matrix a(1, 2);
  a << 3.0, -4.0;
  CHECK(entrywise_norm(a, 1.0) == doctest::Approx(7.0));
  CHECK(entrywise_norm(a, 2.0) == doctest::Approx(5.0));

  Matrix bad(1, 1);
  bad << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(entrywise_norm(bad, 1.0), InvalidInput);
  Matrix ok(1, 1);
  ok << 1.0;
  CHECK_THROWS_AS(entrywise_norm(ok, 0.5), InvalidInput);
  CHECK_THROWS_AS(entrywise_norm(ok, 2.5), InvalidInput);
}

TEST_CASE("norm_1p sums column norms") {
  Matrix eye = Matrix::Identity(2, 2);
  CHECK(norm_1p(eye, 2.0) == doctest::Approx(2.0));

  Matrix a(2, 2);
  a << 1, 0, 1, 0;
  CHECK(norm_1p(a, 1.0) == doctest::Approx(2.0));

  Matrix b(2, 1);
  b << 3, -4;
  CHECK(norm_1p(b, 2.0) == doctest::Approx(5.0));
}

TEST_CASE("select_columns") {
  Matrix eye = Matrix::Identity(3, 3);
  Matrix picked = select_columns(eye, ColumnIndexSet({0, 2}));
  CHECK(picked.cols() == 2);
  CHECK(picked(0, 0) == 1.0);
  CHECK(picked(2, 1) == 1.0);

  Matrix all = select_columns(eye, ColumnIndexSet::all(3));
  CHECK((all - eye).norm() == 0.0);

  Matrix none = select_columns(eye, ColumnIndexSet{});
  CHECK(none.rows() == 3);
  CHECK(none.cols() == 0);

  CHECK_THROWS_AS(select_columns(eye, ColumnIndexSet({3})), InvalidInput);
  CHECK_THROWS_AS(ColumnIndexSet({1, 1}), InvalidInput);
}

TEST_CASE("norm properties over random pairs") {
  SeededRng rng(11);
  for (int t = 0; t < 1000; ++t) {
    Matrix a = gaussian_matrix(4, 5, rng);
    Matrix b = gaussian_matrix(4, 5, rng);
    const double p = 1.0 + rng.uniform();
    CHECK(entrywise_norm(a + b, p) <=
          entrywise_norm(a, p) + entrywise_norm(b, p) + 1e-9);
  }
  // Homogeneity.
  for (int t = 0; t < 100; ++t) {
    Matrix a = gaussian_matrix(3, 7, rng);
    const double c = 4.0 * (rng.uniform() - 0.5);
    const double p = 1.0 + rng.uniform();
    const double lhs = entrywise_norm(c * a, p);
    const double rhs = std::abs(c) * entrywise_norm(a, p);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  // Monotonicity in p for entries bounded by 1 in magnitude.
  for (int t = 0; t < 50; ++t) {
    Matrix a = gaussian_matrix(4, 4, rng);
    a /= std::max(1.0, a.cwiseAbs().maxCoeff());
    double prev = std::numeric_limits<double>::infinity();
    for (double p = 1.0; p <= 2.0; p += 0.25) {
      const double cur = entrywise_norm(a, p);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("rng determinism and forked streams") {
  SeededRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  SeededRng c(42), d(43);
  CHECK(c.next_u64() != d.next_u64());

  SeededRng e(7);
  SeededRng f1 = e.fork("alpha");
  SeededRng e2(7);
  SeededRng f2 = e2.fork("alpha");
  CHECK(f1.next_u64() == f2.next_u64());
  SeededRng e3(7);
  SeededRng g = e3.fork("beta");
  CHECK(f1.next_u64() != g.next_u64());
}

TEST_CASE("matrix market and csv round trips are bit exact") {
  SeededRng rng(3);
  Matrix a = gaussian_matrix(5, 4, rng);
  a(0, 0) = 1.0 / 3.0;
  a(1, 2) = -1e-17;

  const std::string mtx = "roundtrip_test.mtx";
  write_matrix_market(a, mtx);
  Matrix back = read_matrix_market(mtx);
  REQUIRE(back.rows() == a.rows());
  REQUIRE(back.cols() == a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) CHECK(back(i, j) == a(i, j));
  }

  const std::string csv = "roundtrip_test.csv";
  write_csv(a, csv);
  Matrix back2 = read_csv(csv);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) CHECK(back2(i, j) == a(i, j));
  }
  std::remove(mtx.c_str());
  std::remove(csv.c_str());
}

TEST_CASE("numerical rank and exact factorization") {
  SeededRng rng(5);
  Matrix u = gaussian_matrix(6, 2, rng);
  Matrix v = gaussian_matrix(2, 5, rng);
  Matrix a = u * v;
  CHECK(numerical_rank(a) == 2);
  FactorPair fp = exact_rank_factorization(a, 2);
  CHECK(entrywise_norm(a - fp.product(), 1.0) <= 1e-9 * entrywise_norm(a, 1.0));
}
