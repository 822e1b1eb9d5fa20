#pragma once

#include <span>

#include "eduembed/numerics.hpp"

namespace eduembed {

inline constexpr double kDefaultLossScale = 20.0;

struct LossConfig {
  double scale = kDefaultLossScale;  // multiplier on cosine scores before the softmax
};

struct PairLossResult {
  double loss = 0.0;
  Matrix grad_left;
  Matrix grad_right;
};

/// Multiple-negatives ranking loss. Scores S_ij = scale * <anchor_i, positive_j>;
/// the loss is softmax cross-entropy with target j = i, so every other positive in the
/// batch serves as a negative for anchor i. Rows must be unit norm (within 1e-8).
PairLossResult mnrl_loss(const Matrix& anchors, const Matrix& positives, const LossConfig& cfg);

/// Mean over rows of (cos(left_i, right_i) - label_i)^2, differentiated through the norms.
PairLossResult cosine_mse_loss(const Matrix& left, const Matrix& right,
                               std::span<const int> labels);

namespace detail {
// mnrl_loss without the unit-row precondition; used by gradient checks that
// perturb inputs off the unit sphere.
PairLossResult mnrl_loss_unchecked(const Matrix& anchors, const Matrix& positives, double scale);
}  // namespace detail

}  // namespace eduembed
