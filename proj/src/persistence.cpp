#include "eduembed/persistence.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eduembed/errors.hpp"
#include "eduembed/hash.hpp"

namespace eduembed {

using nlohmann::json;

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void append_f32_le(std::string& out, std::span<const double> values) {
  out.reserve(out.size() + 4 * values.size());
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int shift = 0; shift < 32; shift += 8) {
      out.push_back(static_cast<char>((bits >> shift) & 0xffu));
    }
  }
}

std::vector<double> read_f32_le(std::string_view bytes, std::size_t offset, std::size_t count) {
  if (offset + 4 * count > bytes.size()) throw CorruptionError("float block truncated");
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + 4 * i + b]))
              << (8 * b);
    }
    values[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return values;
}

std::string weights_bytes(const EncoderParams& params) {
  std::string out;
  append_f32_le(out, params.embedding_table.data());
  append_f32_le(out, params.projection.data());
  append_f32_le(out, params.bias);
  return out;
}

std::uint64_t weights_fingerprint(const EncoderParams& params) {
  return fnv1a64(weights_bytes(params));
}

std::string fingerprint_hex(std::uint64_t fingerprint) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint));
  return buf;
}

std::uint64_t parse_fingerprint_hex(std::string_view hex) {
  if (hex.size() != 16) throw ParseError("fingerprint must be 16 hex digits");
  std::uint64_t value = 0;
  for (char c : hex) {
    value <<= 4;
    if (c >= '0' && c <= '9') value |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') value |= static_cast<std::uint64_t>(c - 'a' + 10);
    else throw ParseError("invalid hex digit in fingerprint");
  }
  return value;
}

namespace {

std::string vocab_text(const Vocabulary& vocab) {
  std::string out;
  for (const auto& t : vocab.tokens()) {
    out += t;
    out += '\n';
  }
  return out;
}

std::vector<std::string> parse_vocab_text(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) tokens.push_back(line);
  return tokens;
}

json parse_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

template <class T>
T meta_field(const json& meta, const char* key, const std::filesystem::path& path) {
  try {
    return meta.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(path.string() + ": missing or invalid field \"" + key + "\"");
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir, const Vocabulary& vocab,
                     const EncoderParams& params, const json& training) {
  if (params.vocab_total() != vocab.total_size()) {
    throw CompatibilityError("parameters do not match vocabulary size");
  }
  const std::string weights = weights_bytes(params);
  json meta = {
      {"format_version", kCheckpointFormatVersion},
      {"d_emb", params.d_emb()},
      {"d_out", params.d_out()},
      {"known_size", vocab.known_size()},
      {"hash_buckets", vocab.hash_buckets()},
      {"min_count", vocab.min_count()},
      {"seed", params.seed},
      {"training", training},
      {"fingerprint", fingerprint_hex(fnv1a64(weights))},
  };
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "weights.bin", weights);
  write_file_atomic(dir / "vocab.txt", vocab_text(vocab));
  write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.json";
  const json meta = parse_json_file(meta_path);
  const int version = meta_field<int>(meta, "format_version", meta_path);
  if (version != kCheckpointFormatVersion) {
    throw VersionError("unsupported checkpoint format_version " + std::to_string(version));
  }
  const auto d_emb = meta_field<std::size_t>(meta, "d_emb", meta_path);
  const auto d_out = meta_field<std::size_t>(meta, "d_out", meta_path);
  const auto known = meta_field<std::size_t>(meta, "known_size", meta_path);
  const auto buckets = meta_field<std::size_t>(meta, "hash_buckets", meta_path);
  const auto min_count = meta_field<std::size_t>(meta, "min_count", meta_path);
  const auto expected = parse_fingerprint_hex(meta_field<std::string>(meta, "fingerprint", meta_path));

  auto tokens = parse_vocab_text(read_file(dir / "vocab.txt"));
  if (tokens.size() != known) {
    throw CorruptionError("vocab.txt has " + std::to_string(tokens.size()) +
                          " tokens, meta.json says " + std::to_string(known));
  }
  Checkpoint ck;
  ck.vocab = Vocabulary(std::move(tokens), buckets, min_count);

  const std::string weights = read_file(dir / "weights.bin");
  const std::size_t rows = known + buckets;
  const std::size_t count = rows * d_emb + d_emb * d_out + d_out;
  if (weights.size() != 4 * count) {
    throw CorruptionError("weights.bin holds " + std::to_string(weights.size()) +
                          " bytes, expected " + std::to_string(4 * count));
  }
  ck.fingerprint = fnv1a64(weights);
  if (ck.fingerprint != expected) throw CorruptionError("weights.bin fingerprint mismatch");

  std::size_t offset = 0;
  ck.params.embedding_table = Matrix(rows, d_emb, read_f32_le(weights, offset, rows * d_emb));
  offset += 4 * rows * d_emb;
  ck.params.projection = Matrix(d_emb, d_out, read_f32_le(weights, offset, d_emb * d_out));
  offset += 4 * d_emb * d_out;
  ck.params.bias = read_f32_le(weights, offset, d_out);
  ck.params.seed = meta_field<std::uint64_t>(meta, "seed", meta_path);
  ck.training = meta.value("training", json::object());
  return ck;
}

void save_vocabulary(const std::filesystem::path& dir, const Vocabulary& vocab) {
  std::filesystem::create_directories(dir);
  json meta = {{"known_size", vocab.known_size()},
               {"hash_buckets", vocab.hash_buckets()},
               {"min_count", vocab.min_count()}};
  write_file_atomic(dir / "vocab.txt", vocab_text(vocab));
  write_file_atomic(dir / "vocab.json", meta.dump(2) + "\n");
}

Vocabulary load_vocabulary(const std::filesystem::path& dir) {
  const auto meta_path = dir / "vocab.json";
  const json meta = parse_json_file(meta_path);
  auto tokens = parse_vocab_text(read_file(dir / "vocab.txt"));
  const auto known = meta_field<std::size_t>(meta, "known_size", meta_path);
  if (tokens.size() != known) throw CorruptionError("vocab.txt does not match vocab.json");
  return Vocabulary(std::move(tokens), meta_field<std::size_t>(meta, "hash_buckets", meta_path),
                    meta_field<std::size_t>(meta, "min_count", meta_path));
}

}  // namespace eduembed
