#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "eduembed/errors.hpp"
#include "eduembed/numerics.hpp"
#include "support.hpp"

using namespace eduembed;

TEST_CASE("Vec rejects non-finite entries") {
  CHECK_THROWS_AS(Vec({1.0, std::numeric_limits<double>::quiet_NaN()}), NumericError);
  CHECK_THROWS_AS(Vec(std::vector<double>{std::numeric_limits<double>::infinity()}), NumericError);
  CHECK(Vec({1.0, 2.0}).size() == 2);
}

TEST_CASE("Matrix shape checks") {
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
  const Matrix m(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(m(1, 0) == 4);
  CHECK(m.row(1)[2] == 6);
  CHECK(Matrix::identity(3)(2, 2) == 1);
  CHECK(Matrix::identity(3)(0, 2) == 0);
  CHECK_THROWS_AS(Matrix::from_rows({Vec{1, 2}, Vec{1}}), DimensionError);
}

TEST_CASE("dot") {
  CHECK(dot(Vec{1, 0}, Vec{0, 1}) == 0);
  CHECK(dot(Vec{1, 2}, Vec{3, 4}) == 11);
  const Vec u = l2_normalize(Vec{3, 4});
  CHECK(dot(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(dot(Vec{1, 2}, Vec{1}), DimensionError);
}

TEST_CASE("l2_normalize") {
  const Vec v = l2_normalize(Vec{3, 4});
  CHECK(v[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(0.8).epsilon(1e-15));
  const Vec e{0, 1, 0};
  CHECK(l2_normalize(e) == e);
  CHECK_THROWS_AS(l2_normalize(Vec{0, 0}), DegenerateVectorError);
  CHECK_THROWS_AS(l2_normalize(Vec{1e-13, 0}), DegenerateVectorError);

  std::mt19937_64 rng(11);
  const auto m = testing::random_matrix(rng, 50, 9, false);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto once = l2_normalize(m.row(r));
    const auto twice = l2_normalize(once);
    CHECK(std::abs(norm(once) - 1.0) <= 1e-12);
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(std::abs(once[i] - twice[i]) <= 1e-12);
  }
}

TEST_CASE("cosine_similarity") {
  CHECK(cosine_similarity(Vec{2, 5}, Vec{2, 5}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(Vec{1, 0}, Vec{0, 1}) == 0);
  CHECK(cosine_similarity(Vec{1, 1}, Vec{1, 0}) == doctest::Approx(0.70710678118654752).epsilon(1e-15));
  CHECK_THROWS_AS(cosine_similarity(Vec{0, 0}, Vec{1, 0}), DegenerateVectorError);

  std::mt19937_64 rng(12);
  const auto m = testing::random_matrix(rng, 40, 7, false);
  for (std::size_t r = 0; r + 1 < m.rows(); ++r) {
    const double c = cosine_similarity(m.row(r), m.row(r + 1));
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    CHECK(c == cosine_similarity(m.row(r + 1), m.row(r)));
    std::vector<double> scaled(m.row(r).begin(), m.row(r).end());
    for (auto& x : scaled) x *= 3.7;
    CHECK(std::abs(cosine_similarity(scaled, m.row(r + 1)) - c) <= 1e-12);
  }
}

TEST_CASE("softmax_cross_entropy_rows") {
  const std::size_t t0[] = {0};
  CHECK(softmax_cross_entropy_rows(Matrix(1, 1, std::vector<double>{42.0}), t0).loss == 0.0);

  const std::size_t t1[] = {2};
  const auto flat = softmax_cross_entropy_rows(Matrix(1, 4, 3.5), t1);
  CHECK(std::abs(flat.loss - std::log(4.0)) <= 1e-15);

  // stable for large scores
  const std::size_t t2[] = {1, 0};
  const auto big = softmax_cross_entropy_rows(Matrix(2, 2, std::vector<double>{1000, 0, 1000, 0}), t2);
  CHECK(std::isfinite(big.loss));
  CHECK(big.loss == doctest::Approx(500.0));

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 1 + rng() % 6, cols = 1 + rng() % 6;
    auto s = testing::random_matrix(rng, rows, cols, false);
    for (auto& v : s.data()) v *= 10;
    std::vector<std::size_t> targets(rows);
    for (auto& t : targets) t = rng() % cols;
    const auto r = softmax_cross_entropy_rows(s, targets);
    CHECK(r.loss >= 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double sum = std::accumulate(r.grad.row(i).begin(), r.grad.row(i).end(), 0.0);
      CHECK(std::abs(sum) <= 1e-10);
    }
    const auto fd = finite_difference_grad(
        [&](std::span<const double> x) {
          return softmax_cross_entropy_rows(Matrix(rows, cols, {x.begin(), x.end()}), targets).loss;
        },
        s.data(), 1e-5);
    CHECK(max_relative_error(r.grad.data(), fd, 1e-3) <= 1e-6);
  }

  const std::size_t bad[] = {3};
  CHECK_THROWS_AS(softmax_cross_entropy_rows(Matrix(1, 3), bad), DimensionError);
  const std::size_t too_many[] = {0, 0};
  CHECK_THROWS_AS(softmax_cross_entropy_rows(Matrix(1, 3), too_many), DimensionError);
}

TEST_CASE("finite_difference_grad") {
  const double x[] = {3.0};
  const auto g = finite_difference_grad([](std::span<const double> v) { return v[0] * v[0]; }, x, 1e-4);
  CHECK(std::abs(g[0] - 6.0) <= 1e-7);

  const double y[] = {1.0, -2.0, 0.5};
  const auto zero = finite_difference_grad([](std::span<const double>) { return 7.0; }, y, 1e-5);
  for (double v : zero) CHECK(v == 0.0);

  CHECK_THROWS_AS(finite_difference_grad([](std::span<const double> v) { return std::log(v[0]); },
                                         std::vector<double>{0.0}, 1e-5),
                  NumericError);
  CHECK_THROWS_AS(finite_difference_grad([](std::span<const double>) { return 0.0; }, y, 0.0), RangeError);
}

TEST_CASE("max_relative_error") {
  CHECK(max_relative_error(Vec{1.0, 2.0}, Vec{1.0, 2.0}) == 0.0);
  CHECK(max_relative_error(Vec{1.0}, Vec{1.1}) == doctest::Approx(0.1 / 1.1));
  CHECK(max_relative_error(Vec{0.0}, Vec{1e-9}, 1e-6) == doctest::Approx(1e-3));
  CHECK_THROWS_AS(max_relative_error(Vec{1.0}, Vec{1.0, 2.0}), DimensionError);
}
