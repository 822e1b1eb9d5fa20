#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace eduembed {

struct SentencePair {
  std::string anchor;
  std::string positive;
  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

struct LabeledPair {
  std::string sentence1;
  std::string sentence2;
  int label = 0;  // 1 similar, 0 dissimilar
  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

/// JSON-lines with fields "anchor" and "positive". Blank lines are skipped; errors
/// carry the 1-based line number.
std::vector<SentencePair> load_positive_pairs(const std::filesystem::path& path);

/// JSON-lines with fields "sentence1", "sentence2" and integer "label" in {0, 1}.
std::vector<LabeledPair> load_labeled_pairs(const std::filesystem::path& path);

void save_positive_pairs(const std::filesystem::path& path, const std::vector<SentencePair>& pairs);
void save_labeled_pairs(const std::filesystem::path& path, const std::vector<LabeledPair>& pairs);

/// Deterministic 64-bit mixing (splitmix64 finalizer) for deriving per-epoch seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Uniform integer in [0, bound) by rejection sampling over a 64-bit generator.
template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Fisher-Yates permutation of 0..n-1 driven by `seed`.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

/// Shuffled index order cut into consecutive slices; the last slice may be short.
std::vector<std::vector<std::size_t>> batch_indices(std::size_t n, std::size_t batch_size,
                                                    std::uint64_t epoch_seed);

template <class T>
std::vector<std::vector<T>> batches(const std::vector<T>& dataset, std::size_t batch_size,
                                    std::uint64_t epoch_seed) {
  std::vector<std::vector<T>> out;
  for (const auto& idx : batch_indices(dataset.size(), batch_size, epoch_seed)) {
    auto& batch = out.emplace_back();
    batch.reserve(idx.size());
    for (std::size_t i : idx) batch.push_back(dataset[i]);
  }
  return out;
}

}  // namespace eduembed
