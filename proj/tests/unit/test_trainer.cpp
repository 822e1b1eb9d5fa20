#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "eduembed/errors.hpp"
#include "eduembed/synthetic.hpp"
#include "eduembed/trainer.hpp"

using namespace eduembed;

TEST_CASE("config defaults per mode") {
  const auto m = TrainConfig::defaults_for(TrainMode::mnrl_only);
  CHECK(m.epochs == 25);
  CHECK(m.batch_size == 64);
  CHECK(m.peak_lr == 2e-5);
  CHECK(m.warmup_fraction == 0.15);
  CHECK(m.weight_decay == 0.01);
  CHECK(m.loss_scale == 20.0);
  const auto d = TrainConfig::defaults_for(TrainMode::dual);
  CHECK(d.peak_lr == 1e-5);
  CHECK(d.warmup_fraction == 0.10);
  CHECK(parse_train_mode("mnrl") == TrainMode::mnrl_only);
  CHECK(parse_train_mode("dual") == TrainMode::dual);
  CHECK_THROWS_AS(parse_train_mode("triplet"), ConfigError);
}

TEST_CASE("config validation") {
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](TrainConfig& c) { c.epochs = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](TrainConfig& c) { c.batch_size = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](TrainConfig& c) { c.peak_lr = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](TrainConfig& c) { c.warmup_fraction = 1.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](TrainConfig& c) { c.warmup_fraction = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](TrainConfig& c) { c.weight_decay = -0.1; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](TrainConfig& c) { c.loss_scale = 0; }).validate(), ConfigError);
  CHECK_NOTHROW(TrainConfig{}.validate());
}

TEST_CASE("lr_at") {
  const auto s = Schedule::make(200, 0.15, 2e-5);
  CHECK(s.warmup_steps == 30);
  CHECK(lr_at(s, 0) == 0.0);
  CHECK(lr_at(s, 15) == doctest::Approx(1e-5).epsilon(1e-15));
  CHECK(lr_at(s, 30) == 2e-5);
  CHECK(std::abs(lr_at(s, 115) - 1e-5) <= 1e-15);
  CHECK(lr_at(s, 200) == 0.0);
  CHECK_THROWS_AS(lr_at(s, 201), RangeError);

  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const std::size_t total = 1 + rng() % 500;
    const auto sc = Schedule::make(total, 0.01 + 0.98 * static_cast<double>(rng() % 1000) / 1000.0, 0.1);
    CHECK(sc.warmup_steps <= sc.total_steps);
    double prev_decay = INFINITY;
    for (std::size_t step = 0; step <= total; ++step) {
      const double lr = lr_at(sc, step);
      CHECK(lr >= 0.0);
      CHECK(lr <= 0.1);
      if (step >= sc.warmup_steps) {
        CHECK(lr <= prev_decay);
        prev_decay = lr;
      }
    }
    if (sc.warmup_steps > 0) {
      // left limit approaches the peak continuously
      const double left = lr_at(sc, sc.warmup_steps - 1);
      CHECK(0.1 - left == doctest::Approx(0.1 / static_cast<double>(sc.warmup_steps)));
    }
    CHECK(lr_at(sc, sc.warmup_steps) == 0.1);
  }
}

TEST_CASE("adamw_update scalar cases") {
  auto step = [](double w, double g, double lr, double wd) {
    double m = 0, v = 0;
    adamw_update(std::span(&w, 1), std::span<const double>(&g, 1), std::span(&m, 1), std::span(&v, 1), 1, lr, wd,
                 0.9, 0.999, 1e-8);
    return w;
  };
  CHECK(std::abs(step(1.0, 1.0, 0.1, 0.0) - 0.9) <= 1e-6);
  CHECK(std::abs(step(1.0, 1.0, 0.1, 0.01) - 0.899) <= 1e-6);
  CHECK(step(1.0, 0.0, 0.1, 0.0) == 1.0);
  CHECK(step(-2.0, -3.0, 0.1, 0.0) == doctest::Approx(-1.9).epsilon(1e-6));
}

TEST_CASE("adamw_step") {
  auto params = init_params(20, 4, 4, 1);
  auto state = AdamWState::for_params(params);
  CHECK(state.step_count == 0);
  CHECK(state.first_moment == zeros_like(params));

  SUBCASE("zero gradient multiplies by exactly (1 - lr*wd)") {
    for (int i = 0; i < 10; ++i) {
      auto expected = params;
      for (auto& x : expected.embedding_table.data()) x *= 1 - 0.1 * 0.05;
      for (auto& x : expected.projection.data()) x *= 1 - 0.1 * 0.05;
      for (auto& x : expected.bias) x *= 1 - 0.1 * 0.05;
      adamw_step(params, zeros_like(params), state, 0.1, 0.05);
      CHECK(params == expected);
    }
    CHECK(state.step_count == 10);
  }

  SUBCASE("non-finite gradient aborts without changes") {
    auto grads = zeros_like(params);
    grads.bias[2] = NAN;
    const auto before = params;
    CHECK_THROWS_AS(adamw_step(params, grads, state, 0.1, 0.01), NumericError);
    CHECK(params == before);
    CHECK(state.step_count == 0);
  }

  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(adamw_step(params, zeros_like(init_params(21, 4, 4, 1)), state, 0.1, 0.01), DimensionError);
  }
}

namespace {

std::vector<SentencePair> tiny_pairs(std::size_t n) {
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"question " + std::to_string(i % 7) + " about topic" + std::to_string(i),
                   "answer " + std::to_string(i % 5) + " for topic" + std::to_string(i)});
  }
  return out;
}

std::vector<LabeledPair> tiny_labeled(std::size_t n) {
  std::vector<LabeledPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"left " + std::to_string(i), "right " + std::to_string(i % 3), static_cast<int>(i % 2)});
  }
  return out;
}

Vocabulary vocab_for(const std::vector<SentencePair>& pos, const std::vector<LabeledPair>& lab) {
  std::vector<std::string> texts;
  for (const auto& p : pos) {
    texts.push_back(p.anchor);
    texts.push_back(p.positive);
  }
  for (const auto& p : lab) {
    texts.push_back(p.sentence1);
    texts.push_back(p.sentence2);
  }
  return build_vocab(texts, 1, 16);
}

}  // namespace

TEST_CASE("train step counts and alternation") {
  const auto pos = tiny_pairs(64);
  const auto lab = tiny_labeled(150);
  const auto vocab = vocab_for(pos, lab);
  const auto params = init_params(vocab.total_size(), 8, 8, 1);

  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 64;
  cfg.peak_lr = 0.01;
  CHECK(train(params, vocab, pos, std::nullopt, cfg).history.size() == 1);

  cfg.mode = TrainMode::dual;
  cfg.epochs = 2;
  cfg.batch_size = 32;
  const auto result = train(params, vocab, pos, lab, cfg);
  // per epoch: 2 MNRL + 5 cosine -> M C M C C C C
  const std::vector<LossKind> epoch_kinds{LossKind::mnrl,   LossKind::cosine, LossKind::mnrl,  LossKind::cosine,
                                          LossKind::cosine, LossKind::cosine, LossKind::cosine};
  REQUIRE(result.history.size() == 14);
  CHECK(result.history.size() == total_training_steps(cfg, pos.size(), lab.size()));
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    CHECK(result.history[i].step == i);
    CHECK(result.history[i].epoch == i / 7);
    CHECK(result.history[i].kind == epoch_kinds[i % 7]);
    CHECK(std::isfinite(result.history[i].loss));
  }
  CHECK(result.history.front().lr == 0.0);

  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    TrainConfig c;
    c.epochs = 1 + rng() % 3;
    c.batch_size = 1 + rng() % 40;
    c.peak_lr = 0.01;
    c.mode = rng() % 2 ? TrainMode::dual : TrainMode::mnrl_only;
    const auto p = tiny_pairs(1 + rng() % 60);
    const auto l = tiny_labeled(1 + rng() % 60);
    const auto v = vocab_for(p, l);
    const auto r = train(init_params(v.total_size(), 4, 4, 2), v, p, l, c);
    const std::size_t per_epoch = (p.size() + c.batch_size - 1) / c.batch_size +
                                  (c.mode == TrainMode::dual ? (l.size() + c.batch_size - 1) / c.batch_size : 0);
    CHECK(r.history.size() == c.epochs * per_epoch);
  }
}

TEST_CASE("train errors") {
  const auto pos = tiny_pairs(10);
  const auto vocab = vocab_for(pos, {});
  const auto params = init_params(vocab.total_size(), 4, 4, 1);
  TrainConfig cfg;
  cfg.mode = TrainMode::dual;
  CHECK_THROWS_AS(train(params, vocab, pos, std::nullopt, cfg), ConfigError);
  CHECK_THROWS_AS(train(params, vocab, pos, std::vector<LabeledPair>{}, cfg), ConfigError);
  cfg.mode = TrainMode::mnrl_only;
  CHECK_THROWS_AS(train(params, vocab, {}, std::nullopt, cfg), ConfigError);
  CHECK_THROWS_AS(train(params, vocab, {{"ok", "..."}}, std::nullopt, cfg), ValidationError);

  cfg.peak_lr = 1e308;
  cfg.epochs = 3;
  CHECK_THROWS_AS(train(params, vocab, pos, std::nullopt, cfg), NumericError);
}

TEST_CASE("train is deterministic and reduces loss on synthetic data") {
  const auto corpus = generate_synthetic(SynthSpec::defaults(42, 256, 64));
  std::vector<std::string> texts;
  for (const auto& p : corpus.positives) {
    texts.push_back(p.anchor);
    texts.push_back(p.positive);
  }
  const auto vocab = build_vocab(texts);
  auto cfg = TrainConfig::defaults_for(TrainMode::dual);
  cfg.peak_lr = 0.05;
  cfg.epochs = 25;
  const auto init = init_params(vocab.total_size(), 64, 64, cfg.seed);
  const auto a = train(init, vocab, corpus.positives, corpus.labeled, cfg);
  const auto b = train(init, vocab, corpus.positives, corpus.labeled, cfg);
  CHECK(a.params == b.params);
  CHECK(history_jsonl(a.history) == history_jsonl(b.history));
  const auto mnrl = epoch_mean_losses(a.history, LossKind::mnrl);
  REQUIRE(mnrl.size() == 25);
  CHECK(mnrl.back() < 0.25 * mnrl.front());
}

TEST_CASE("history records") {
  const StepRecord r{3, 1, LossKind::cosine, 0.25, 1e-3};
  const auto j = to_json(r);
  CHECK(j["step"] == 3);
  CHECK(j["epoch"] == 1);
  CHECK(j["loss_kind"] == "cosine");
  CHECK(j["loss"] == 0.25);
  CHECK(j["lr"] == 1e-3);
  CHECK(history_jsonl({r, r}) == j.dump() + "\n" + j.dump() + "\n");
}
