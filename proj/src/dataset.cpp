#include "eduembed/dataset.hpp"

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "eduembed/encoder.hpp"
#include "eduembed/errors.hpp"
#include "eduembed/persistence.hpp"

namespace eduembed {

namespace {

using nlohmann::json;

template <class Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!record.is_object()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected a JSON object");
    }
    fn(record, line_no);
  }
}

std::string string_field(const json& record, const char* key, const std::filesystem::path& path,
                         std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) + ": missing string field \"" +
                     key + "\"");
  }
  auto value = it->get<std::string>();
  if (tokenize(value).empty()) {
    throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": field \"" + key +
                          "\" has no tokens");
  }
  return value;
}

}  // namespace

std::vector<SentencePair> load_positive_pairs(const std::filesystem::path& path) {
  std::vector<SentencePair> pairs;
  for_each_json_line(path, [&](const json& r, std::size_t line_no) {
    pairs.push_back({string_field(r, "anchor", path, line_no),
                     string_field(r, "positive", path, line_no)});
  });
  return pairs;
}

std::vector<LabeledPair> load_labeled_pairs(const std::filesystem::path& path) {
  std::vector<LabeledPair> pairs;
  for_each_json_line(path, [&](const json& r, std::size_t line_no) {
    LabeledPair p{string_field(r, "sentence1", path, line_no),
                  string_field(r, "sentence2", path, line_no), 0};
    auto it = r.find("label");
    if (it == r.end() || !it->is_number_integer()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": missing integer field \"label\"");
    }
    const auto label = it->get<long long>();
    if (label != 0 && label != 1) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": label " +
                            std::to_string(label) + " is not 0 or 1");
    }
    p.label = static_cast<int>(label);
    pairs.push_back(std::move(p));
  });
  return pairs;
}

void save_positive_pairs(const std::filesystem::path& path, const std::vector<SentencePair>& pairs) {
  std::ostringstream out;
  for (const auto& p : pairs) {
    out << json{{"anchor", p.anchor}, {"positive", p.positive}}.dump() << '\n';
  }
  write_file_atomic(path, out.str());
}

void save_labeled_pairs(const std::filesystem::path& path, const std::vector<LabeledPair>& pairs) {
  std::ostringstream out;
  for (const auto& p : pairs) {
    out << json{{"sentence1", p.sentence1}, {"sentence2", p.sentence2}, {"label", p.label}}.dump()
        << '\n';
  }
  write_file_atomic(path, out.str());
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::vector<std::vector<std::size_t>> batch_indices(std::size_t n, std::size_t batch_size,
                                                    std::uint64_t epoch_seed) {
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  const auto order = shuffled_indices(n, epoch_seed);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace eduembed
