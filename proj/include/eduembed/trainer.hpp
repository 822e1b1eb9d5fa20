#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eduembed/dataset.hpp"
#include "eduembed/encoder.hpp"

namespace eduembed {

enum class TrainMode { mnrl_only, dual };

std::string to_string(TrainMode mode);
TrainMode parse_train_mode(const std::string& text);

struct TrainConfig {
  TrainMode mode = TrainMode::mnrl_only;
  std::size_t epochs = 25;
  std::size_t batch_size = 64;
  double peak_lr = 2e-5;
  double warmup_fraction = 0.15;
  double weight_decay = 0.01;
  double loss_scale = 20.0;
  std::uint64_t seed = 42;

  /// Reference settings per mode: MNRL-only 2e-5 with 15% warmup, dual 1e-5 with 10%.
  static TrainConfig defaults_for(TrainMode mode);
  void validate() const;
  nlohmann::json to_json() const;
};

struct Schedule {
  std::size_t total_steps = 0;
  std::size_t warmup_steps = 0;
  double peak_lr = 0.0;

  /// warmup_steps = round(fraction * total), capped at total - 1 so the cosine
  /// phase always has at least one step.
  static Schedule make(std::size_t total_steps, double warmup_fraction, double peak_lr);
};

/// Linear warmup from 0 to peak, then half-cosine decay to 0 at total_steps.
double lr_at(const Schedule& schedule, std::size_t step);

struct AdamWState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step_count = 0;
  EncoderParams first_moment;
  EncoderParams second_moment;

  static AdamWState for_params(const EncoderParams& params);
};

/// Bias-corrected Adam with decoupled weight decay on one parameter block:
/// p <- p * (1 - lr * decay) - lr * m_hat / (sqrt(v_hat) + eps). `step` is 1-based.
void adamw_update(std::span<double> params, std::span<const double> grads,
                  std::span<double> first_moment, std::span<double> second_moment,
                  std::uint64_t step, double lr, double weight_decay, double beta1, double beta2,
                  double epsilon);

/// Applies adamw_update to every block. Non-finite gradients abort before any change.
void adamw_step(EncoderParams& params, const EncoderParams& grads, AdamWState& state, double lr,
                double weight_decay);

enum class LossKind { mnrl, cosine };
std::string to_string(LossKind kind);

struct StepRecord {
  std::size_t step = 0;
  std::size_t epoch = 0;
  LossKind kind = LossKind::mnrl;
  double loss = 0.0;
  double lr = 0.0;
};

nlohmann::json to_json(const StepRecord& record);
std::string history_jsonl(const std::vector<StepRecord>& history);

struct TrainResult {
  EncoderParams params;
  std::vector<StepRecord> history;
};

/// epochs * (ceil(|pos|/batch) + ceil(|labeled|/batch)); labeled counts only in dual mode.
std::size_t total_training_steps(const TrainConfig& cfg, std::size_t positive_count,
                                 std::size_t labeled_count);

/// MNRL-only: one loader of positive pairs. Dual: per epoch, MNRL and cosine batches
/// alternate strictly (MNRL first); the longer loader drains after the shorter ends.
TrainResult train(EncoderParams params, const Vocabulary& vocab,
                  const std::vector<SentencePair>& positive_pairs,
                  const std::optional<std::vector<LabeledPair>>& labeled_pairs,
                  const TrainConfig& cfg);

/// Mean loss of the given kind per epoch (index 0 = first epoch).
std::vector<double> epoch_mean_losses(const std::vector<StepRecord>& history, LossKind kind);

}  // namespace eduembed
