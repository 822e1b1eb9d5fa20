#include "eduembed/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eduembed/errors.hpp"

namespace eduembed {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericError(std::string(what) + ": non-finite entry at index " + std::to_string(i));
    }
  }
}

void require_same_length(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionError("length mismatch: " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
  }
}

}  // namespace

Vec::Vec(std::size_t n, double fill) : values_(n, fill) { require_finite(values_, "Vec"); }

Vec::Vec(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_, "Vec");
}

Vec::Vec(std::initializer_list<double> values) : values_(values) {
  require_finite(values_, "Vec");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw DimensionError("matrix storage holds " + std::to_string(values_.size()) +
                         " values, expected " + std::to_string(rows_ * cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw DimensionError("ragged rows in Matrix::from_rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

void Matrix::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

double dot(std::span<const double> u, std::span<const double> v) {
  require_same_length(u, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
  return sum;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Vec l2_normalize(std::span<const double> v) {
  const double n = norm(v);
  if (!(n > kNormEpsilon)) {
    throw DegenerateVectorError("cannot normalize vector with norm " + std::to_string(n));
  }
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return Vec(std::move(out));
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  require_same_length(u, v);
  const double nu = norm(u);
  const double nv = norm(v);
  if (!(nu > kNormEpsilon) || !(nv > kNormEpsilon)) {
    throw DegenerateVectorError("cosine similarity of a degenerate vector");
  }
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

CrossEntropyResult softmax_cross_entropy_rows(const Matrix& scores,
                                              std::span<const std::size_t> targets) {
  if (targets.size() != scores.rows()) {
    throw DimensionError("targets length " + std::to_string(targets.size()) + " != rows " +
                         std::to_string(scores.rows()));
  }
  CrossEntropyResult result{0.0, Matrix(scores.rows(), scores.cols())};
  if (scores.rows() == 0) return result;
  const double inv_rows = 1.0 / static_cast<double>(scores.rows());

  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const std::size_t target = targets[i];
    if (target >= scores.cols()) {
      throw DimensionError("target " + std::to_string(target) + " out of range for " +
                           std::to_string(scores.cols()) + " columns");
    }
    auto row = scores.row(i);
    const double row_max = *std::max_element(row.begin(), row.end());
    double sum_exp = 0.0;
    for (double s : row) sum_exp += std::exp(s - row_max);
    const double log_sum_exp = std::log(sum_exp);
    result.loss += (log_sum_exp - (row[target] - row_max)) * inv_rows;

    auto grad = result.grad.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      grad[j] = std::exp(row[j] - row_max - log_sum_exp) * inv_rows;
    }
    grad[target] -= inv_rows;
  }
  return result;
}

Vec finite_difference_grad(const ScalarFunction& f, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw RangeError("finite difference step must be positive");
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = f(point);
    point[i] = saved - h;
    const double down = f(point);
    point[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("non-finite function value near coordinate " + std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * h);
  }
  return Vec(std::move(grad));
}

double max_relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  require_same_length(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace eduembed
