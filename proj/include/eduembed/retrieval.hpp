#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eduembed/encoder.hpp"

namespace eduembed {

inline constexpr std::size_t kDefaultMaxWords = 300;
inline constexpr int kIndexFormatVersion = 1;

struct Chunk {
  std::string doc_id;
  std::size_t chunk_index = 0;
  std::string text;
  std::size_t word_start = 0;  // half-open span over the doc's whitespace-separated words
  std::size_t word_end = 0;
  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct Document {
  std::string doc_id;
  std::string text;
};

/// Whitespace-separated words packed into consecutive windows of `max_words`; the
/// last window may be shorter. Each chunk's text is the original substring from its
/// first to its last word. `overlap` words are repeated between neighbours (0 = none).
std::vector<Chunk> chunk_document(const std::string& doc_id, const std::string& text,
                                  std::size_t max_words = kDefaultMaxWords,
                                  std::size_t overlap = 0);

/// Whitespace-separated words of `text`, as used by the chunker.
std::vector<std::string> split_words(const std::string& text);

struct IndexEntry {
  Chunk chunk;
  Vec embedding;  // unit norm
};

struct ChunkIndex {
  std::vector<IndexEntry> entries;
  std::size_t dim = 0;
  std::size_t max_words = kDefaultMaxWords;
  std::uint64_t fingerprint = 0;  // weights fingerprint of the encoder that built it
  std::size_t skipped_chunks = 0;  // chunks without any token

  friend bool operator==(const ChunkIndex& a, const ChunkIndex& b) {
    if (a.dim != b.dim || a.max_words != b.max_words || a.fingerprint != b.fingerprint ||
        a.entries.size() != b.entries.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      if (!(a.entries[i].chunk == b.entries[i].chunk) ||
          !(a.entries[i].embedding == b.entries[i].embedding)) {
        return false;
      }
    }
    return true;
  }
};

/// Entries are ordered by (document order, chunk order).
ChunkIndex build_index(const std::vector<Document>& docs, const Encoder& encoder,
                       std::size_t max_words = kDefaultMaxWords, std::size_t overlap = 0);

struct RetrievalHit {
  Chunk chunk;
  std::size_t entry_index = 0;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

/// Exact scan ranked by score descending, ties by (doc_id, chunk_index) ascending.
std::vector<RetrievalHit> top_k_vector(const ChunkIndex& index, std::span<const double> query,
                                       std::size_t k,
                                       const std::optional<std::string>& doc_filter = std::nullopt);

/// Encodes the question with `encoder`, which must have produced the index.
std::vector<RetrievalHit> top_k(const ChunkIndex& index, const Encoder& encoder,
                                const std::string& question, std::size_t k = 3,
                                const std::optional<std::string>& doc_filter = std::nullopt);

/// Chunk texts in rank order joined by a blank line.
std::string assemble_context(const std::vector<RetrievalHit>& hits);

/// Single file: JSON header line, one JSON manifest line per entry, then the
/// embeddings as row-major little-endian binary32.
void save_index(const std::filesystem::path& path, const ChunkIndex& index);
ChunkIndex load_index(const std::filesystem::path& path);

/// Text files under `dir` with extension .txt, sorted by name; doc_id is the stem.
std::vector<Document> load_documents(const std::filesystem::path& dir);

}  // namespace eduembed
