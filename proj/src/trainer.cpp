#include "eduembed/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "eduembed/errors.hpp"
#include "eduembed/losses.hpp"

namespace eduembed {

using nlohmann::json;

std::string to_string(TrainMode mode) { return mode == TrainMode::dual ? "dual" : "mnrl"; }

TrainMode parse_train_mode(const std::string& text) {
  if (text == "dual") return TrainMode::dual;
  if (text == "mnrl" || text == "mnrl_only") return TrainMode::mnrl_only;
  throw ConfigError("unknown training mode '" + text + "'");
}

std::string to_string(LossKind kind) { return kind == LossKind::mnrl ? "mnrl" : "cosine"; }

TrainConfig TrainConfig::defaults_for(TrainMode mode) {
  TrainConfig cfg;
  cfg.mode = mode;
  if (mode == TrainMode::dual) {
    cfg.peak_lr = 1e-5;
    cfg.warmup_fraction = 0.10;
  }
  return cfg;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (!(peak_lr > 0.0)) throw ConfigError("peak learning rate must be positive");
  if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0)) {
    throw ConfigError("warmup fraction must lie in (0, 1)");
  }
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be non-negative");
  if (!(loss_scale > 0.0)) throw ConfigError("loss scale must be positive");
}

json TrainConfig::to_json() const {
  return {{"mode", to_string(mode)},         {"epochs", epochs},
          {"batch_size", batch_size},        {"peak_lr", peak_lr},
          {"warmup_fraction", warmup_fraction}, {"weight_decay", weight_decay},
          {"loss_scale", loss_scale},        {"seed", seed}};
}

Schedule Schedule::make(std::size_t total_steps, double warmup_fraction, double peak_lr) {
  auto warmup = static_cast<std::size_t>(std::llround(warmup_fraction * static_cast<double>(total_steps)));
  if (total_steps > 0 && warmup >= total_steps) warmup = total_steps - 1;
  if (total_steps == 0) warmup = 0;
  return {total_steps, warmup, peak_lr};
}

double lr_at(const Schedule& s, std::size_t step) {
  if (step > s.total_steps) {
    throw RangeError("step " + std::to_string(step) + " beyond schedule of " +
                     std::to_string(s.total_steps) + " steps");
  }
  if (step < s.warmup_steps) {
    return s.peak_lr * static_cast<double>(step) / static_cast<double>(s.warmup_steps);
  }
  if (s.total_steps == s.warmup_steps) return 0.0;
  const double progress = static_cast<double>(step - s.warmup_steps) /
                          static_cast<double>(s.total_steps - s.warmup_steps);
  if (progress >= 1.0) return 0.0;
  return s.peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamWState AdamWState::for_params(const EncoderParams& params) {
  AdamWState s;
  s.first_moment = zeros_like(params);
  s.second_moment = zeros_like(params);
  return s;
}

void adamw_update(std::span<double> params, std::span<const double> grads,
                  std::span<double> m, std::span<double> v, std::uint64_t step, double lr,
                  double weight_decay, double beta1, double beta2, double epsilon) {
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size()) {
    throw DimensionError("AdamW block shapes differ");
  }
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  const double decay = 1.0 - lr * weight_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    params[i] = params[i] * decay - lr * m_hat / (std::sqrt(v_hat) + epsilon);
  }
}

void adamw_step(EncoderParams& params, const EncoderParams& grads, AdamWState& state, double lr,
                double weight_decay) {
  if (grads.embedding_table.rows() != params.embedding_table.rows() ||
      grads.embedding_table.cols() != params.embedding_table.cols() ||
      grads.projection.rows() != params.projection.rows() ||
      grads.projection.cols() != params.projection.cols() ||
      grads.bias.size() != params.bias.size()) {
    throw DimensionError("gradient shapes do not match parameters");
  }
  auto check = [](std::span<const double> g, const char* block) {
    for (double x : g) {
      if (!std::isfinite(x)) throw NumericError(std::string("non-finite gradient in ") + block);
    }
  };
  check(grads.embedding_table.data(), "embedding table");
  check(grads.projection.data(), "projection");
  check(grads.bias, "bias");

  if (state.first_moment.embedding_table.rows() != params.embedding_table.rows()) {
    state.first_moment = zeros_like(params);
    state.second_moment = zeros_like(params);
  }
  const std::uint64_t step = ++state.step_count;
  auto update = [&](std::span<double> p, std::span<const double> g, std::span<double> m,
                    std::span<double> v) {
    adamw_update(p, g, m, v, step, lr, weight_decay, state.beta1, state.beta2, state.epsilon);
  };
  update(params.embedding_table.data(), grads.embedding_table.data(),
         state.first_moment.embedding_table.data(), state.second_moment.embedding_table.data());
  update(params.projection.data(), grads.projection.data(), state.first_moment.projection.data(),
         state.second_moment.projection.data());
  update(params.bias, grads.bias, state.first_moment.bias, state.second_moment.bias);
}

json to_json(const StepRecord& r) {
  return {{"step", r.step},
          {"epoch", r.epoch},
          {"loss_kind", to_string(r.kind)},
          {"loss", r.loss},
          {"lr", r.lr}};
}

std::string history_jsonl(const std::vector<StepRecord>& history) {
  std::string out;
  for (const auto& r : history) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::vector<std::size_t> ids_or_throw(const Vocabulary& vocab, const std::string& text,
                                      const char* what, std::size_t index) {
  auto ids = token_ids(vocab, text);
  if (ids.empty()) {
    throw ValidationError(std::string(what) + " " + std::to_string(index) + " has no tokens");
  }
  return ids;
}

bool all_finite(const EncoderParams& p) {
  const auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(p.embedding_table.data().begin(), p.embedding_table.data().end(), finite) &&
         std::all_of(p.projection.data().begin(), p.projection.data().end(), finite) &&
         std::all_of(p.bias.begin(), p.bias.end(), finite);
}

class Loop {
 public:
  Loop(EncoderParams params, const TrainConfig& cfg, Schedule schedule)
      : params_(std::move(params)),
        grads_(zeros_like(params_)),
        state_(AdamWState::for_params(params_)),
        cfg_(cfg),
        schedule_(schedule) {}

  void mnrl_step(const std::vector<std::vector<std::size_t>>& anchors,
                 const std::vector<std::vector<std::size_t>>& positives, std::size_t epoch) {
    const auto a = encode_all(anchors);
    const auto p = encode_all(positives);
    const auto result = mnrl_loss(as_matrix(a), as_matrix(p), LossConfig{cfg_.loss_scale});
    finish_step(a, p, result.grad_left, result.grad_right, result.loss, LossKind::mnrl, epoch);
  }

  void cosine_step(const std::vector<std::vector<std::size_t>>& left,
                   const std::vector<std::vector<std::size_t>>& right,
                   const std::vector<int>& labels, std::size_t epoch) {
    const auto l = encode_all(left);
    const auto r = encode_all(right);
    const auto result = cosine_mse_loss(as_matrix(l), as_matrix(r), labels);
    finish_step(l, r, result.grad_left, result.grad_right, result.loss, LossKind::cosine, epoch);
  }

  EncoderParams take_params() { return std::move(params_); }
  std::vector<StepRecord> take_history() { return std::move(history_); }

 private:
  std::vector<EncodeTrace> encode_all(const std::vector<std::vector<std::size_t>>& ids) const {
    std::vector<EncodeTrace> traces;
    traces.reserve(ids.size());
    for (const auto& t : ids) traces.push_back(encode_traced(params_, t));
    return traces;
  }

  static Matrix as_matrix(const std::vector<EncodeTrace>& traces) {
    Matrix m(traces.size(), traces.front().output.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
      std::copy(traces[i].output.begin(), traces[i].output.end(), m.row(i).begin());
    }
    return m;
  }

  void finish_step(const std::vector<EncodeTrace>& left, const std::vector<EncodeTrace>& right,
                   const Matrix& grad_left, const Matrix& grad_right, double loss, LossKind kind,
                   std::size_t epoch) {
    const std::size_t step = history_.size();
    if (!std::isfinite(loss)) {
      throw NumericError("non-finite " + to_string(kind) + " loss at step " + std::to_string(step));
    }
    grads_.embedding_table.fill(0.0);
    grads_.projection.fill(0.0);
    std::fill(grads_.bias.begin(), grads_.bias.end(), 0.0);
    for (std::size_t i = 0; i < left.size(); ++i) {
      accumulate_encode_backward(params_, left[i], grad_left.row(i), grads_);
      accumulate_encode_backward(params_, right[i], grad_right.row(i), grads_);
    }
    const double lr = lr_at(schedule_, step);
    try {
      adamw_step(params_, grads_, state_, lr, cfg_.weight_decay);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at step " + std::to_string(step));
    }
    if (!all_finite(params_)) {
      throw NumericError("non-finite parameters after step " + std::to_string(step));
    }
    history_.push_back({step, epoch, kind, loss, lr});
  }

  EncoderParams params_;
  EncoderParams grads_;
  AdamWState state_;
  TrainConfig cfg_;
  Schedule schedule_;
  std::vector<StepRecord> history_;
};

}  // namespace

std::size_t total_training_steps(const TrainConfig& cfg, std::size_t positive_count,
                                 std::size_t labeled_count) {
  std::size_t per_epoch = ceil_div(positive_count, cfg.batch_size);
  if (cfg.mode == TrainMode::dual) per_epoch += ceil_div(labeled_count, cfg.batch_size);
  return cfg.epochs * per_epoch;
}

TrainResult train(EncoderParams params, const Vocabulary& vocab,
                  const std::vector<SentencePair>& positive_pairs,
                  const std::optional<std::vector<LabeledPair>>& labeled_pairs,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (params.vocab_total() != vocab.total_size()) {
    throw CompatibilityError("parameters do not match vocabulary size");
  }
  if (positive_pairs.empty()) throw ConfigError("positive pair dataset is empty");
  const bool dual = cfg.mode == TrainMode::dual;
  if (dual && !labeled_pairs) throw ConfigError("dual mode requires labeled pairs");
  if (dual && labeled_pairs->empty()) throw ConfigError("labeled pair dataset is empty");

  std::vector<std::vector<std::size_t>> anchor_ids, positive_ids, left_ids, right_ids;
  std::vector<int> labels;
  for (std::size_t i = 0; i < positive_pairs.size(); ++i) {
    anchor_ids.push_back(ids_or_throw(vocab, positive_pairs[i].anchor, "positive pair", i));
    positive_ids.push_back(ids_or_throw(vocab, positive_pairs[i].positive, "positive pair", i));
  }
  if (dual) {
    for (std::size_t i = 0; i < labeled_pairs->size(); ++i) {
      const auto& lp = (*labeled_pairs)[i];
      left_ids.push_back(ids_or_throw(vocab, lp.sentence1, "labeled pair", i));
      right_ids.push_back(ids_or_throw(vocab, lp.sentence2, "labeled pair", i));
      labels.push_back(lp.label);
    }
  }

  const std::size_t total =
      total_training_steps(cfg, positive_pairs.size(), dual ? labeled_pairs->size() : 0);
  Loop loop(std::move(params), cfg, Schedule::make(total, cfg.warmup_fraction, cfg.peak_lr));

  auto gather = [](const std::vector<std::vector<std::size_t>>& all,
                   const std::vector<std::size_t>& idx) {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(all[i]);
    return out;
  };

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto mnrl_batches =
        batch_indices(positive_pairs.size(), cfg.batch_size, mix_seed(cfg.seed, epoch, 0));
    std::vector<std::vector<std::size_t>> cosine_batches;
    if (dual) {
      cosine_batches =
          batch_indices(labeled_pairs->size(), cfg.batch_size, mix_seed(cfg.seed, epoch, 1));
    }
    const std::size_t rounds = std::max(mnrl_batches.size(), cosine_batches.size());
    for (std::size_t b = 0; b < rounds; ++b) {
      if (b < mnrl_batches.size()) {
        const auto& idx = mnrl_batches[b];
        loop.mnrl_step(gather(anchor_ids, idx), gather(positive_ids, idx), epoch);
      }
      if (b < cosine_batches.size()) {
        const auto& idx = cosine_batches[b];
        std::vector<int> batch_labels;
        for (std::size_t i : idx) batch_labels.push_back(labels[i]);
        loop.cosine_step(gather(left_ids, idx), gather(right_ids, idx), batch_labels, epoch);
      }
    }
  }
  return {loop.take_params(), loop.take_history()};
}

std::vector<double> epoch_mean_losses(const std::vector<StepRecord>& history, LossKind kind) {
  std::vector<double> sums, counts;
  for (const auto& r : history) {
    if (r.kind != kind) continue;
    if (r.epoch >= sums.size()) {
      sums.resize(r.epoch + 1, 0.0);
      counts.resize(r.epoch + 1, 0.0);
    }
    sums[r.epoch] += r.loss;
    counts[r.epoch] += 1.0;
  }
  for (std::size_t e = 0; e < sums.size(); ++e) {
    if (counts[e] > 0) sums[e] /= counts[e];
  }
  return sums;
}

}  // namespace eduembed
