#include "eduembed/losses.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "eduembed/errors.hpp"

namespace eduembed {

namespace {

void require_matching(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("batch shapes differ: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
  if (a.rows() == 0) throw EmptyInputError("loss needs at least one row");
}

void require_unit_rows(const Matrix& m, const char* name) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double n = norm(m.row(i));
    if (std::abs(n - 1.0) > 1e-8) {
      throw PreconditionError(std::string(name) + " row " + std::to_string(i) +
                              " is not unit norm (" + std::to_string(n) + ")");
    }
  }
}

}  // namespace

namespace detail {

PairLossResult mnrl_loss_unchecked(const Matrix& anchors, const Matrix& positives, double scale) {
  require_matching(anchors, positives);
  const std::size_t batch = anchors.rows();
  const std::size_t dim = anchors.cols();

  Matrix scores(batch, batch);
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < batch; ++j) {
      scores(i, j) = scale * dot(anchors.row(i), positives.row(j));
    }
  }
  std::vector<std::size_t> targets(batch);
  std::iota(targets.begin(), targets.end(), std::size_t{0});
  auto ce = softmax_cross_entropy_rows(scores, targets);

  PairLossResult out{ce.loss, Matrix(batch, dim), Matrix(batch, dim)};
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < batch; ++j) {
      const double g = scale * ce.grad(i, j);
      if (g == 0.0) continue;
      auto ga = out.grad_left.row(i);
      auto gp = out.grad_right.row(j);
      auto a = anchors.row(i);
      auto p = positives.row(j);
      for (std::size_t k = 0; k < dim; ++k) {
        ga[k] += g * p[k];
        gp[k] += g * a[k];
      }
    }
  }
  return out;
}

}  // namespace detail

PairLossResult mnrl_loss(const Matrix& anchors, const Matrix& positives, const LossConfig& cfg) {
  if (!(cfg.scale > 0.0)) throw ConfigError("MNRL scale must be positive");
  require_matching(anchors, positives);
  require_unit_rows(anchors, "anchor");
  require_unit_rows(positives, "positive");
  return detail::mnrl_loss_unchecked(anchors, positives, cfg.scale);
}

PairLossResult cosine_mse_loss(const Matrix& left, const Matrix& right,
                               std::span<const int> labels) {
  require_matching(left, right);
  const std::size_t batch = left.rows();
  const std::size_t dim = left.cols();
  if (labels.size() != batch) {
    throw DimensionError("labels length " + std::to_string(labels.size()) + " != batch " +
                         std::to_string(batch));
  }
  const double inv_batch = 1.0 / static_cast<double>(batch);

  PairLossResult out{0.0, Matrix(batch, dim), Matrix(batch, dim)};
  for (std::size_t i = 0; i < batch; ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw ValidationError("label at index " + std::to_string(i) + " is not 0 or 1");
    }
    auto l = left.row(i);
    auto r = right.row(i);
    const double nl = norm(l);
    const double nr = norm(r);
    if (!(nl > kNormEpsilon) || !(nr > kNormEpsilon)) {
      throw DegenerateVectorError("degenerate row at index " + std::to_string(i));
    }
    // Unclamped cosine keeps the loss smooth for the gradient.
    const double c = dot(l, r) / (nl * nr);
    const double diff = c - static_cast<double>(labels[i]);
    out.loss += diff * diff * inv_batch;

    const double coef = 2.0 * diff * inv_batch;
    auto gl = out.grad_left.row(i);
    auto gr = out.grad_right.row(i);
    for (std::size_t k = 0; k < dim; ++k) {
      gl[k] = coef * (r[k] / (nl * nr) - c * l[k] / (nl * nl));
      gr[k] = coef * (l[k] / (nl * nr) - c * r[k] / (nr * nr));
    }
  }
  return out;
}

}  // namespace eduembed
