#include "eduembed/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "eduembed/errors.hpp"
#include "eduembed/persistence.hpp"

namespace eduembed {

using nlohmann::json;

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

struct WordSpan {
  std::size_t begin;
  std::size_t end;
};

std::vector<WordSpan> word_spans(const std::string& text) {
  std::vector<WordSpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i == text.size()) break;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    spans.push_back({start, i});
  }
  return spans;
}

bool hit_before(const RetrievalHit& a, const RetrievalHit& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.chunk.doc_id != b.chunk.doc_id) return a.chunk.doc_id < b.chunk.doc_id;
  return a.chunk.chunk_index < b.chunk.chunk_index;
}

}  // namespace

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  for (const auto& s : word_spans(text)) words.push_back(text.substr(s.begin, s.end - s.begin));
  return words;
}

std::vector<Chunk> chunk_document(const std::string& doc_id, const std::string& text,
                                  std::size_t max_words, std::size_t overlap) {
  if (max_words < 1) throw ConfigError("max_words must be at least 1");
  if (overlap >= max_words) throw ConfigError("chunk overlap must be smaller than max_words");
  const auto spans = word_spans(text);
  std::vector<Chunk> chunks;
  const std::size_t stride = max_words - overlap;
  for (std::size_t start = 0; start < spans.size(); start += stride) {
    const std::size_t end = std::min(spans.size(), start + max_words);
    Chunk c;
    c.doc_id = doc_id;
    c.chunk_index = chunks.size();
    c.word_start = start;
    c.word_end = end;
    c.text = text.substr(spans[start].begin, spans[end - 1].end - spans[start].begin);
    chunks.push_back(std::move(c));
    if (end == spans.size()) break;
  }
  return chunks;
}

ChunkIndex build_index(const std::vector<Document>& docs, const Encoder& encoder,
                       std::size_t max_words, std::size_t overlap) {
  ChunkIndex index;
  index.dim = encoder.params.d_out();
  index.max_words = max_words;
  index.fingerprint = encoder.fingerprint;
  for (const auto& doc : docs) {
    for (auto& chunk : chunk_document(doc.doc_id, doc.text, max_words, overlap)) {
      const auto ids = token_ids(encoder.vocab, chunk.text);
      if (ids.empty()) {
        ++index.skipped_chunks;
        continue;
      }
      try {
        index.entries.push_back({chunk, encode_traced(encoder.params, ids).output});
      } catch (const Error& e) {
        throw Error(e.kind(), "encoding doc '" + doc.doc_id + "' chunk " +
                                  std::to_string(chunk.chunk_index) + ": " + e.what());
      }
    }
  }
  return index;
}

std::vector<RetrievalHit> top_k_vector(const ChunkIndex& index, std::span<const double> query,
                                       std::size_t k, const std::optional<std::string>& doc_filter) {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (query.size() != index.dim) {
    throw DimensionError("query has dimension " + std::to_string(query.size()) + ", index has " +
                         std::to_string(index.dim));
  }
  std::vector<RetrievalHit> candidates;
  for (std::size_t i = 0; i < index.entries.size(); ++i) {
    const auto& entry = index.entries[i];
    if (doc_filter && entry.chunk.doc_id != *doc_filter) continue;
    const double score = std::clamp(dot(query, entry.embedding), -1.0, 1.0);
    candidates.push_back({entry.chunk, i, score, 0});
  }
  const std::size_t keep = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), hit_before);
  candidates.resize(keep);
  for (std::size_t r = 0; r < keep; ++r) candidates[r].rank = r + 1;
  return candidates;
}

std::vector<RetrievalHit> top_k(const ChunkIndex& index, const Encoder& encoder,
                                const std::string& question, std::size_t k,
                                const std::optional<std::string>& doc_filter) {
  if (encoder.fingerprint != index.fingerprint) {
    throw CompatibilityError("index was built by encoder " + fingerprint_hex(index.fingerprint) +
                             " but the loaded encoder is " + fingerprint_hex(encoder.fingerprint));
  }
  const auto ids = token_ids(encoder.vocab, question);
  if (ids.empty()) throw EmptyInputError("question has no tokens");
  return top_k_vector(index, encode_traced(encoder.params, ids).output, k, doc_filter);
}

std::string assemble_context(const std::vector<RetrievalHit>& hits) {
  std::string out;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += hits[i].chunk.text;
  }
  return out;
}

void save_index(const std::filesystem::path& path, const ChunkIndex& index) {
  json header = {{"version", kIndexFormatVersion},
                 {"dim", index.dim},
                 {"max_words", index.max_words},
                 {"fingerprint", fingerprint_hex(index.fingerprint)},
                 {"count", index.entries.size()}};
  std::string out = header.dump() + "\n";
  for (const auto& e : index.entries) {
    out += json{{"doc_id", e.chunk.doc_id},
                {"chunk_index", e.chunk.chunk_index},
                {"word_start", e.chunk.word_start},
                {"word_end", e.chunk.word_end},
                {"text", e.chunk.text}}
               .dump();
    out += '\n';
  }
  for (const auto& e : index.entries) {
    if (e.embedding.size() != index.dim) throw DimensionError("index entry dimension mismatch");
    append_f32_le(out, e.embedding);
  }
  write_file_atomic(path, out);
}

ChunkIndex load_index(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw CorruptionError(path.string() + ": truncated index header");
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  auto parse = [&](const std::string& line) {
    try {
      return json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  };

  ChunkIndex index;
  std::size_t count = 0;
  try {
    const json header = parse(next_line());
    const int version = header.at("version").get<int>();
    if (version != kIndexFormatVersion) {
      throw VersionError("unsupported index version " + std::to_string(version));
    }
    index.dim = header.at("dim").get<std::size_t>();
    index.max_words = header.at("max_words").get<std::size_t>();
    index.fingerprint = parse_fingerprint_hex(header.at("fingerprint").get<std::string>());
    count = header.at("count").get<std::size_t>();
    for (std::size_t i = 0; i < count; ++i) {
      const json m = parse(next_line());
      Chunk c;
      c.doc_id = m.at("doc_id").get<std::string>();
      c.chunk_index = m.at("chunk_index").get<std::size_t>();
      c.word_start = m.at("word_start").get<std::size_t>();
      c.word_end = m.at("word_end").get<std::size_t>();
      c.text = m.at("text").get<std::string>();
      index.entries.push_back({std::move(c), Vec{}});
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (bytes.size() - pos != 4 * count * index.dim) {
    throw CorruptionError(path.string() + ": embedding block has " +
                          std::to_string(bytes.size() - pos) + " bytes, expected " +
                          std::to_string(4 * count * index.dim));
  }
  for (std::size_t i = 0; i < count; ++i) {
    Vec v(read_f32_le(bytes, pos + 4 * i * index.dim, index.dim));
    if (std::abs(norm(v) - 1.0) > 1e-6) {
      throw CorruptionError(path.string() + ": entry " + std::to_string(i) + " is not unit norm");
    }
    index.entries[i].embedding = std::move(v);
  }
  return index;
}

std::vector<Document> load_documents(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Document> docs;
  for (const auto& f : files) docs.push_back({f.stem().string(), read_file(f)});
  return docs;
}

}  // namespace eduembed
