#include "lpra/matrix.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace lpra {

bool is_finite(const Matrix& a) { return a.allFinite(); }

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

namespace {

void require_p(double p) {
  if (!(p >= 1.0 && p <= 2.0)) {
    throw InvalidInput("p must lie in [1,2], got " + std::to_string(p));
  }
}

double abs_pow_sum(const double* data, Index n, double p) {
  double s = 0.0;
  if (p == 1.0) {
    for (Index i = 0; i < n; ++i) s += std::abs(data[i]);
  } else if (p == 2.0) {
    for (Index i = 0; i < n; ++i) s += data[i] * data[i];
  } else {
    for (Index i = 0; i < n; ++i) s += std::pow(std::abs(data[i]), p);
  }
  return s;
}

}  // namespace

double entrywise_norm_pow(const Matrix& a, double p) {
  require_p(p);
  require_finite(a, "entrywise_norm");
  return abs_pow_sum(a.data(), a.size(), p);
}

double entrywise_norm(const Matrix& a, double p) {
  if (a.size() == 0) return 0.0;
  return std::pow(entrywise_norm_pow(a, p), 1.0 / p);
}

double lp_norm_pow(const Vector& v, double p) {
  require_p(p);
  require_finite(v, "lp_norm");
  return abs_pow_sum(v.data(), v.size(), p);
}

double lp_norm(const Vector& v, double p) {
  if (v.size() == 0) return 0.0;
  return std::pow(lp_norm_pow(v, p), 1.0 / p);
}

double norm_1p(const Matrix& a, double p) {
  require_p(p);
  require_finite(a, "norm_1p");
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    Vector col = a.col(j);
    s += lp_norm(col, p);
  }
  return s;
}

ColumnIndexSet::ColumnIndexSet(std::vector<Index> idx) : indices(std::move(idx)) {
  std::sort(indices.begin(), indices.end());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || (i > 0 && indices[i] == indices[i - 1])) {
      throw InvalidInput("ColumnIndexSet: indices must be distinct and nonnegative");
    }
  }
}

void ColumnIndexSet::check_against(Index cols) const {
  if (!indices.empty() && indices.back() >= cols) {
    throw InvalidInput("ColumnIndexSet: index out of range");
  }
}

ColumnIndexSet ColumnIndexSet::all(Index cols) {
  std::vector<Index> idx(static_cast<std::size_t>(cols));
  for (Index i = 0; i < cols; ++i) idx[static_cast<std::size_t>(i)] = i;
  return ColumnIndexSet(std::move(idx));
}

ColumnIndexSet ColumnIndexSet::united_with(const ColumnIndexSet& other) const {
  std::vector<Index> merged;
  merged.reserve(indices.size() + other.indices.size());
  std::merge(indices.begin(), indices.end(), other.indices.begin(), other.indices.end(),
             std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  return ColumnIndexSet(std::move(merged));
}

Matrix select_columns(const Matrix& a, const ColumnIndexSet& s) {
  s.check_against(a.cols());
  Matrix out(a.rows(), s.size());
  for (Index j = 0; j < s.size(); ++j) {
    out.col(j) = a.col(s.indices[static_cast<std::size_t>(j)]);
  }
  return out;
}

Index numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++r;
  }
  return r;
}

FactorPair exact_rank_factorization(const Matrix& a, Index rank) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Index take = std::min(rank, sv.size());
  FactorPair fp;
  fp.left = Matrix::Zero(a.rows(), rank);
  fp.right = Matrix::Zero(rank, a.cols());
  for (Index i = 0; i < take; ++i) {
    fp.left.col(i) = svd.matrixU().col(i) * sv(i);
    fp.right.row(i) = svd.matrixV().col(i).transpose();
  }
  fp.target_rank = rank;
  fp.achieved_error_p = 0.0;
  return fp;
}

}  // namespace lpra
