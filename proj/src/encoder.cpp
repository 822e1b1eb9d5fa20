#include "eduembed/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>

#include "eduembed/errors.hpp"
#include "eduembed/hash.hpp"
#include "eduembed/persistence.hpp"

namespace eduembed {

namespace {

bool is_token_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::size_t hash_buckets,
                       std::size_t min_count)
    : tokens_(std::move(tokens)), hash_buckets_(hash_buckets), min_count_(min_count) {
  ids_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw ValidationError("vocabulary token " + std::to_string(i) + " is empty");
    if (!ids_.emplace(tokens_[i], i).second) {
      throw ValidationError("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.find(std::string(token)) != ids_.end();
}

std::size_t Vocabulary::token_id(std::string_view token) const {
  if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
  if (hash_buckets_ == 0) {
    throw UnknownTokenError("unknown token '" + std::string(token) + "' and no hash buckets");
  }
  return tokens_.size() + static_cast<std::size_t>(fnv1a64(token) % hash_buckets_);
}

Vocabulary build_vocab(const std::vector<std::string>& corpus, std::size_t min_count,
                       std::size_t hash_buckets) {
  if (min_count < 1) throw ConfigError("min_count must be at least 1");
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& text : corpus) {
    for (auto& token : tokenize(text)) {
      auto [it, inserted] = counts.try_emplace(token, 0);
      if (inserted) order.push_back(token);
      ++it->second;
    }
  }
  std::vector<std::string> kept;
  for (auto& token : order) {
    if (counts[token] >= min_count) kept.push_back(std::move(token));
  }
  return Vocabulary(std::move(kept), hash_buckets, min_count);
}

EncoderParams init_params(std::size_t vocab_total, std::size_t d_emb, std::size_t d_out,
                          std::uint64_t seed) {
  if (vocab_total < 1 || d_emb < 1 || d_out < 1) {
    throw ConfigError("encoder dimensions must be at least 1");
  }
  EncoderParams p;
  p.seed = seed;
  p.embedding_table = Matrix(vocab_total, d_emb);
  p.projection = Matrix(d_emb, d_out);
  p.bias.assign(d_out, 0.0);

  const double bound = 1.0 / std::sqrt(static_cast<double>(d_emb));
  std::mt19937_64 rng(seed);
  for (double& x : p.embedding_table.data()) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    x = -bound + 2.0 * bound * unit;
  }
  for (std::size_t i = 0; i < std::min(d_emb, d_out); ++i) p.projection(i, i) = 1.0;
  return p;
}

std::vector<std::size_t> token_ids(const Vocabulary& vocab, std::string_view text) {
  std::vector<std::size_t> ids;
  for (const auto& token : tokenize(text)) ids.push_back(vocab.token_id(token));
  return ids;
}

EncodeTrace encode_traced(const EncoderParams& params, const std::vector<std::size_t>& ids) {
  if (ids.empty()) throw EmptyInputError("text has no tokens");
  const std::size_t d_emb = params.d_emb();
  const std::size_t d_out = params.d_out();

  EncodeTrace t;
  t.ids = ids;
  t.pooled.assign(d_emb, 0.0);
  for (std::size_t id : ids) {
    if (id >= params.vocab_total()) {
      throw DimensionError("token id " + std::to_string(id) + " outside embedding table");
    }
    auto row = params.embedding_table.row(id);
    for (std::size_t k = 0; k < d_emb; ++k) t.pooled[k] += row[k];
  }
  const double inv_n = 1.0 / static_cast<double>(ids.size());
  for (double& x : t.pooled) x *= inv_n;

  t.projected = params.bias;
  for (std::size_t k = 0; k < d_emb; ++k) {
    const double v = t.pooled[k];
    if (v == 0.0) continue;
    auto prow = params.projection.row(k);
    for (std::size_t j = 0; j < d_out; ++j) t.projected[j] += v * prow[j];
  }
  t.projected_norm = norm(t.projected);
  t.output = l2_normalize(t.projected);
  return t;
}

Vec encode(const EncoderParams& params, const Vocabulary& vocab, std::string_view text) {
  return encode_traced(params, token_ids(vocab, text)).output;
}

Matrix encode_batch(const EncoderParams& params, const Vocabulary& vocab,
                    const std::vector<std::string>& texts) {
  Matrix out(texts.size(), params.d_out());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto ids = token_ids(vocab, texts[i]);
    if (ids.empty()) throw EmptyInputError("text at index " + std::to_string(i) + " has no tokens");
    const Vec v = encode_traced(params, ids).output;
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

namespace {

// d(upstream . u/|u|)/du = (g - (g.y) y) / |u|
std::vector<double> grad_wrt_projected(const EncodeTrace& t, std::span<const double> upstream) {
  if (upstream.size() != t.output.size()) {
    throw DimensionError("upstream gradient has length " + std::to_string(upstream.size()) +
                         ", expected " + std::to_string(t.output.size()));
  }
  const double gy = dot(upstream, t.output);
  std::vector<double> du(upstream.size());
  for (std::size_t j = 0; j < du.size(); ++j) {
    du[j] = (upstream[j] - gy * t.output[j]) / t.projected_norm;
  }
  return du;
}

std::vector<double> grad_wrt_pooled(const EncoderParams& params, std::span<const double> du) {
  std::vector<double> dv(params.d_emb(), 0.0);
  for (std::size_t k = 0; k < dv.size(); ++k) dv[k] = dot(params.projection.row(k), du);
  return dv;
}

}  // namespace

void EncoderGrads::add_to(EncoderParams& dense) const {
  for (std::size_t r = 0; r < embedding_rows.size(); ++r) {
    auto src = embedding_grads.row(r);
    auto dst = dense.embedding_table.row(embedding_rows[r]);
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] += src[k];
  }
  auto dp = dense.projection.data();
  auto sp = projection.data();
  for (std::size_t i = 0; i < sp.size(); ++i) dp[i] += sp[i];
  for (std::size_t j = 0; j < bias.size(); ++j) dense.bias[j] += bias[j];
}

EncoderGrads encode_backward(const EncoderParams& params, const Vocabulary& vocab,
                             std::string_view text, std::span<const double> upstream) {
  const EncodeTrace t = encode_traced(params, token_ids(vocab, text));
  const auto du = grad_wrt_projected(t, upstream);
  const auto dv = grad_wrt_pooled(params, du);

  EncoderGrads g;
  g.bias = du;
  g.projection = Matrix(params.d_emb(), params.d_out());
  for (std::size_t k = 0; k < params.d_emb(); ++k) {
    auto row = g.projection.row(k);
    for (std::size_t j = 0; j < du.size(); ++j) row[j] = t.pooled[k] * du[j];
  }

  std::map<std::size_t, std::size_t> occurrences;
  for (std::size_t id : t.ids) ++occurrences[id];
  g.embedding_grads = Matrix(occurrences.size(), params.d_emb());
  const double inv_n = 1.0 / static_cast<double>(t.ids.size());
  std::size_t r = 0;
  for (const auto& [id, count] : occurrences) {
    g.embedding_rows.push_back(id);
    auto row = g.embedding_grads.row(r++);
    const double weight = static_cast<double>(count) * inv_n;
    for (std::size_t k = 0; k < dv.size(); ++k) row[k] = weight * dv[k];
  }
  return g;
}

void accumulate_encode_backward(const EncoderParams& params, const EncodeTrace& trace,
                                std::span<const double> upstream, EncoderParams& dense) {
  const auto du = grad_wrt_projected(trace, upstream);
  const auto dv = grad_wrt_pooled(params, du);
  for (std::size_t j = 0; j < du.size(); ++j) dense.bias[j] += du[j];
  for (std::size_t k = 0; k < params.d_emb(); ++k) {
    const double v = trace.pooled[k];
    auto row = dense.projection.row(k);
    for (std::size_t j = 0; j < du.size(); ++j) row[j] += v * du[j];
  }
  const double inv_n = 1.0 / static_cast<double>(trace.ids.size());
  for (std::size_t id : trace.ids) {
    auto row = dense.embedding_table.row(id);
    for (std::size_t k = 0; k < dv.size(); ++k) row[k] += inv_n * dv[k];
  }
}

EncoderParams zeros_like(const EncoderParams& params) {
  EncoderParams z;
  z.seed = params.seed;
  z.embedding_table = Matrix(params.embedding_table.rows(), params.embedding_table.cols());
  z.projection = Matrix(params.projection.rows(), params.projection.cols());
  z.bias.assign(params.bias.size(), 0.0);
  return z;
}

Encoder make_encoder(Vocabulary vocab, EncoderParams params) {
  if (params.vocab_total() != vocab.total_size()) {
    throw CompatibilityError("embedding table has " + std::to_string(params.vocab_total()) +
                             " rows but vocabulary needs " + std::to_string(vocab.total_size()));
  }
  Encoder e{std::move(vocab), std::move(params), 0};
  e.fingerprint = weights_fingerprint(e.params);
  return e;
}

}  // namespace eduembed
