#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpra {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown on malformed inputs (non-finite entries, bad dimensions, bad indices).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an enumeration/guess budget is exceeded and no fallback applies.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_finite(const Matrix& a);
void require_finite(const Matrix& a, const char* what);
void require_finite(const Vector& v, const char* what);

/// (sum_ij |a_ij|^p)^(1/p) for p in [1,2].
double entrywise_norm(const Matrix& a, double p);

/// sum_ij |a_ij|^p, the p-th power form used by cost accounting.
double entrywise_norm_pow(const Matrix& a, double p);
double lp_norm(const Vector& v, double p);
double lp_norm_pow(const Vector& v, double p);

/// sum over columns of the column lp norm.
double norm_1p(const Matrix& a, double p);

/// Sorted distinct column indices into a parent matrix.
struct ColumnIndexSet {
  std::vector<Index> indices;

  ColumnIndexSet() = default;
  explicit ColumnIndexSet(std::vector<Index> idx);

  Index size() const { return static_cast<Index>(indices.size()); }
  bool empty() const { return indices.empty(); }

  /// Validates against a parent with `cols` columns.
  void check_against(Index cols) const;

  static ColumnIndexSet all(Index cols);
  ColumnIndexSet united_with(const ColumnIndexSet& other) const;
};

Matrix select_columns(const Matrix& a, const ColumnIndexSet& s);

/// A low-rank factorization together with its achieved error and provenance.
struct FactorPair {
  Matrix left;    // n x r
  Matrix right;   // r x d
  Index target_rank = 0;
  double achieved_error_p = 0.0;
  std::string algorithm_tag;
  std::uint64_t seed = 0;

  Matrix product() const { return left * right; }
};

/// Numerical rank with a relative singular-value threshold.
Index numerical_rank(const Matrix& a, double rel_tol = 1e-9);

/// Exact factorization A = U V with U having `rank` columns; requires
/// numerical_rank(a) <= rank. Used by the rank-<=k early returns.
FactorPair exact_rank_factorization(const Matrix& a, Index rank);

}  // namespace lpra
