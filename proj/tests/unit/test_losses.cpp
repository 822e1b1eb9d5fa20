#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "eduembed/errors.hpp"
#include "eduembed/losses.hpp"
#include "support.hpp"

using namespace eduembed;

namespace {

Matrix permute_rows(const Matrix& m, const std::vector<std::size_t>& order) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::copy(m.row(order[i]).begin(), m.row(order[i]).end(), out.row(i).begin());
  }
  return out;
}

std::vector<double> concat(const Matrix& a, const Matrix& b) {
  std::vector<double> x(a.data().begin(), a.data().end());
  x.insert(x.end(), b.data().begin(), b.data().end());
  return x;
}

}  // namespace

TEST_CASE("mnrl_loss reference values") {
  const Matrix I = Matrix::identity(2);
  const Matrix swapped(2, 2, std::vector<double>{0, 1, 1, 0});
  CHECK(mnrl_loss(I, I, {}).loss == doctest::Approx(std::log1p(std::exp(-20.0))).epsilon(1e-12));
  CHECK(mnrl_loss(I, I, {}).loss == doctest::Approx(2.0612e-9).epsilon(1e-4));
  CHECK(mnrl_loss(I, swapped, {}).loss == doctest::Approx(20.0 + std::log1p(std::exp(-20.0))).epsilon(1e-14));

  std::mt19937_64 rng(4);
  for (std::size_t B = 1; B <= 8; ++B) {
    const auto A = testing::random_matrix(rng, B, 5, true);
    const auto P = testing::random_matrix(rng, B, 5, true);
    CHECK(std::abs(mnrl_loss(A, P, {1e-300}).loss - std::log(static_cast<double>(B))) <= 1e-12);
  }
  const auto single = testing::random_matrix(rng, 1, 5, true);
  CHECK(mnrl_loss(single, single, {}).loss == 0.0);
}

TEST_CASE("mnrl_loss preconditions") {
  const Matrix I = Matrix::identity(2);
  CHECK_THROWS_AS(mnrl_loss(I, I, {0.0}), ConfigError);
  CHECK_THROWS_AS(mnrl_loss(I, I, {-1.0}), ConfigError);
  CHECK_THROWS_AS(mnrl_loss(I, Matrix(2, 2, std::vector<double>{2, 0, 0, 1}), {}), PreconditionError);
  CHECK_THROWS_AS(mnrl_loss(I, Matrix::identity(3), {}), DimensionError);
  CHECK_THROWS_AS(mnrl_loss(Matrix(0, 2), Matrix(0, 2), {}), EmptyInputError);
}

TEST_CASE("mnrl_loss gradient, equivariance and monotonicity") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t B = 1 + rng() % 8, d = 2 + rng() % 15;
    const auto A = testing::random_matrix(rng, B, d, true);
    const auto P = testing::random_matrix(rng, B, d, true);
    const auto r = mnrl_loss(A, P, {});
    CHECK(r.loss >= 0.0);

    const auto fd = finite_difference_grad(
        [&](std::span<const double> x) {
          const std::size_t n = B * d;
          return detail::mnrl_loss_unchecked(Matrix(B, d, {x.begin(), x.begin() + n}),
                                             Matrix(B, d, {x.begin() + n, x.end()}), 20.0)
              .loss;
        },
        concat(A, P), 1e-5);
    CHECK(max_relative_error(concat(r.grad_left, r.grad_right), fd, 1e-3) <= 1e-4);

    std::vector<std::size_t> order(B);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    CHECK(std::abs(mnrl_loss(permute_rows(A, order), permute_rows(P, order), {}).loss - r.loss) <= 1e-12);
  }

  // anchors fixed; rotating positive 0 toward anchor 0 raises S_00 only
  const Matrix A(2, 3, std::vector<double>{1, 0, 0, 0, 1, 0});
  double previous = INFINITY;
  for (double theta : {1.2, 0.9, 0.6, 0.3, 0.0}) {
    const Matrix P(2, 3, std::vector<double>{std::cos(theta), 0, std::sin(theta), 0, 1, 0});
    const double loss = mnrl_loss(A, P, {}).loss;
    CHECK(loss < previous);
    previous = loss;
  }
}

TEST_CASE("cosine_mse_loss reference values") {
  const Matrix u(1, 2, std::vector<double>{1, 0}), v(1, 2, std::vector<double>{0, 1});
  const int one[] = {1}, zero[] = {0};
  CHECK(cosine_mse_loss(u, u, one).loss == 0.0);
  CHECK(cosine_mse_loss(u, v, zero).loss == 0.0);
  CHECK(cosine_mse_loss(u, v, one).loss == 1.0);
  CHECK(cosine_mse_loss(u, u, zero).loss == 1.0);

  const Matrix two_l(2, 2, std::vector<double>{1, 0, 1, 0}), two_r(2, 2, std::vector<double>{1, 0, 0, 1});
  const int labels[] = {1, 1};
  CHECK(cosine_mse_loss(two_l, two_r, labels).loss == 0.5);
}

TEST_CASE("cosine_mse_loss errors") {
  const Matrix u(2, 2, std::vector<double>{1, 0, 0, 0}), v(2, 2, std::vector<double>{1, 0, 1, 0});
  const int labels[] = {1, 0};
  try {
    cosine_mse_loss(u, v, labels);
    FAIL("expected DegenerateVectorError");
  } catch (const DegenerateVectorError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
  const int bad[] = {1, 2};
  CHECK_THROWS_AS(cosine_mse_loss(v, v, bad), ValidationError);
  const int short_labels[] = {1};
  CHECK_THROWS_AS(cosine_mse_loss(v, v, short_labels), DimensionError);
}

TEST_CASE("cosine_mse_loss gradient, bounds and scale invariance") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const std::size_t B = 1 + rng() % 8, d = 2 + rng() % 15;
    const auto L = testing::random_matrix(rng, B, d, false);
    const auto R = testing::random_matrix(rng, B, d, false);
    std::vector<int> labels(B);
    for (auto& l : labels) l = static_cast<int>(rng() % 2);
    const auto r = cosine_mse_loss(L, R, labels);
    CHECK(r.loss >= 0.0);
    CHECK(r.loss <= 4.0);

    const auto fd = finite_difference_grad(
        [&](std::span<const double> x) {
          const std::size_t n = B * d;
          return cosine_mse_loss(Matrix(B, d, {x.begin(), x.begin() + n}), Matrix(B, d, {x.begin() + n, x.end()}),
                                 labels)
              .loss;
        },
        concat(L, R), 1e-5);
    CHECK(max_relative_error(concat(r.grad_left, r.grad_right), fd, 1e-3) <= 1e-4);

    auto scaled = L;
    const std::size_t row = rng() % B;
    const double factor = 0.1 + static_cast<double>(rng() % 100);
    for (auto& x : scaled.row(row)) x *= factor;
    CHECK(std::abs(cosine_mse_loss(scaled, R, labels).loss - r.loss) <= 1e-10);
  }
}
