#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eduembed/numerics.hpp"

namespace eduembed {

inline constexpr std::size_t kDefaultHashBuckets = 1024;
inline constexpr std::size_t kDefaultEmbeddingDim = 64;

/// Lowercases ASCII letters and splits on every maximal run of non-alphanumeric
/// characters. Bytes >= 0x80 are kept inside tokens so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

/// Dense ids for known tokens, followed by `hash_buckets` ids for everything else.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> tokens, std::size_t hash_buckets, std::size_t min_count);

  std::size_t known_size() const noexcept { return tokens_.size(); }
  std::size_t hash_buckets() const noexcept { return hash_buckets_; }
  std::size_t min_count() const noexcept { return min_count_; }
  std::size_t total_size() const noexcept { return tokens_.size() + hash_buckets_; }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& token_of(std::size_t id) const { return tokens_.at(id); }
  bool contains(std::string_view token) const;

  /// Known tokens map to their dense id; others hash (FNV-1a 64) into the bucket range.
  std::size_t token_id(std::string_view token) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.hash_buckets_ == b.hash_buckets_ &&
           a.min_count_ == b.min_count_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::size_t hash_buckets_ = 0;
  std::size_t min_count_ = 1;
};

/// Tokens reaching `min_count` get ids in first-occurrence order.
Vocabulary build_vocab(const std::vector<std::string>& corpus, std::size_t min_count = 1,
                       std::size_t hash_buckets = kDefaultHashBuckets);

/// Embedding bag (mean pooling) -> affine projection -> L2 normalization.
struct EncoderParams {
  Matrix embedding_table;  // vocab_total x d_emb
  Matrix projection;       // d_emb x d_out
  std::vector<double> bias;  // d_out
  std::uint64_t seed = 0;

  std::size_t vocab_total() const noexcept { return embedding_table.rows(); }
  std::size_t d_emb() const noexcept { return embedding_table.cols(); }
  std::size_t d_out() const noexcept { return projection.cols(); }

  friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

/// Embedding entries uniform in [-1/sqrt(d_emb), 1/sqrt(d_emb)]; projection is the
/// identity padded with zeros; bias is zero.
EncoderParams init_params(std::size_t vocab_total, std::size_t d_emb, std::size_t d_out,
                          std::uint64_t seed);

std::vector<std::size_t> token_ids(const Vocabulary& vocab, std::string_view text);

/// Intermediate values of one forward pass, reused by the backward pass.
struct EncodeTrace {
  std::vector<std::size_t> ids;
  std::vector<double> pooled;     // mean embedding, d_emb
  std::vector<double> projected;  // pooled * projection + bias, d_out
  double projected_norm = 0.0;
  Vec output;                     // unit norm, d_out
};

EncodeTrace encode_traced(const EncoderParams& params, const std::vector<std::size_t>& ids);

/// Unit-norm sentence embedding. Throws EmptyInputError for token-less text.
Vec encode(const EncoderParams& params, const Vocabulary& vocab, std::string_view text);

/// Row i is encode(texts[i]).
Matrix encode_batch(const EncoderParams& params, const Vocabulary& vocab,
                    const std::vector<std::string>& texts);

/// Gradient of a scalar with respect to EncoderParams. The embedding part is stored
/// sparsely: only rows touched by the text are present (others are implicitly zero).
struct EncoderGrads {
  std::vector<std::size_t> embedding_rows;  // sorted, unique
  Matrix embedding_grads;                   // embedding_rows.size() x d_emb
  Matrix projection;                        // d_emb x d_out
  std::vector<double> bias;                 // d_out

  /// Dense gradient shaped like `params`, accumulated into `dense` (same shapes).
  void add_to(EncoderParams& dense) const;
};

/// Gradient of dot(upstream, encode(text)) including the normalization Jacobian.
EncoderGrads encode_backward(const EncoderParams& params, const Vocabulary& vocab,
                             std::string_view text, std::span<const double> upstream);

/// Same, using a trace from encode_traced; accumulates straight into dense buffers.
void accumulate_encode_backward(const EncoderParams& params, const EncodeTrace& trace,
                                std::span<const double> upstream, EncoderParams& dense_grads);

/// Zero-valued parameter block with the same shapes as `params`.
EncoderParams zeros_like(const EncoderParams& params);

/// A loaded model: parameters plus vocabulary and the weights fingerprint.
struct Encoder {
  Vocabulary vocab;
  EncoderParams params;
  std::uint64_t fingerprint = 0;

  Vec encode(std::string_view text) const { return eduembed::encode(params, vocab, text); }
};

Encoder make_encoder(Vocabulary vocab, EncoderParams params);

}  // namespace eduembed
