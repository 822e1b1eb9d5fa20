#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eduembed/encoder.hpp"

namespace eduembed {

inline constexpr int kCheckpointFormatVersion = 1;

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Little-endian IEEE-754 binary32 encoding of `values` appended to `out`.
void append_f32_le(std::string& out, std::span<const double> values);
/// Decodes `count` binary32 values starting at `offset`.
std::vector<double> read_f32_le(std::string_view bytes, std::size_t offset, std::size_t count);

/// weights.bin payload: embedding table, projection, bias, each row-major binary32.
std::string weights_bytes(const EncoderParams& params);
std::uint64_t weights_fingerprint(const EncoderParams& params);
std::string fingerprint_hex(std::uint64_t fingerprint);
std::uint64_t parse_fingerprint_hex(std::string_view hex);

struct Checkpoint {
  Vocabulary vocab;
  EncoderParams params;
  nlohmann::json training = nlohmann::json::object();  // echo of the training config
  std::uint64_t fingerprint = 0;

  Encoder encoder() const { return make_encoder(vocab, params); }
};

/// Directory layout: meta.json, vocab.txt (one token per line, id order), weights.bin.
void save_checkpoint(const std::filesystem::path& dir, const Vocabulary& vocab,
                     const EncoderParams& params,
                     const nlohmann::json& training = nlohmann::json::object());
Checkpoint load_checkpoint(const std::filesystem::path& dir);

/// Vocabulary alone (build-vocab output): vocab.txt plus vocab.json with bucket settings.
void save_vocabulary(const std::filesystem::path& dir, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::filesystem::path& dir);

}  // namespace eduembed
