#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace eduembed {

/// Norms at or below this are treated as degenerate (no silent zeroing).
inline constexpr double kNormEpsilon = 1e-12;

/// Dense real vector. Constructors reject NaN and infinity.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0);
  explicit Vec(std::vector<double> values);
  Vec(std::initializer_list<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> span() const noexcept { return values_; }
  std::span<double> span() noexcept { return values_; }
  operator std::span<const double>() const noexcept { return values_; }  // NOLINT

  const std::vector<double>& values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const Vec&, const Vec&) = default;

 private:
  std::vector<double> values_;
};

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

  std::span<const double> data() const noexcept { return values_; }
  std::span<double> data() noexcept { return values_; }

  void fill(double value);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

double dot(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> v);

/// Throws DegenerateVectorError when the norm is at or below kNormEpsilon.
Vec l2_normalize(std::span<const double> v);

/// Cosine similarity clamped to [-1, 1].
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct CrossEntropyResult {
  double loss = 0.0;
  Matrix grad;  // d loss / d scores
};

/// Mean over rows of -log softmax(scores_i)[targets_i], stabilized by row-max subtraction.
CrossEntropyResult softmax_cross_entropy_rows(const Matrix& scores,
                                              std::span<const std::size_t> targets);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central differences per coordinate. Non-finite evaluations raise NumericError.
Vec finite_difference_grad(const ScalarFunction& f, std::span<const double> x, double h);

/// Max over coordinates of |a - b| / max(|a|, |b|, floor).
double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor = 1e-6);

}  // namespace eduembed
