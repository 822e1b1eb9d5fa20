#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <tuple>

#include <json.hpp>

#include "eduembed/errors.hpp"
#include "eduembed/persistence.hpp"
#include "eduembed/retrieval.hpp"
#include "support.hpp"

using namespace eduembed;
namespace fs = std::filesystem;

namespace {

std::string words(std::size_t n, const std::string& sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += "w" + std::to_string(i) + sep;
  return s;
}

Encoder small_encoder(std::uint64_t seed = 1) {
  const auto vocab = build_vocab({"who teaches the course instructor credit hours ta office"}, 1, 64);
  return make_encoder(vocab, init_params(vocab.total_size(), 8, 8, seed));
}

ChunkIndex random_index(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  const auto m = testing::random_matrix(rng, n, dim, true);
  ChunkIndex index;
  index.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    Chunk c;
    c.doc_id = "d" + std::to_string(i % 4);
    c.chunk_index = i / 4;
    c.text = "chunk " + std::to_string(i);
    index.entries.push_back({c, Vec(std::vector<double>(m.row(i).begin(), m.row(i).end()))});
  }
  return index;
}

}  // namespace

TEST_CASE("chunk_document") {
  const auto c650 = chunk_document("d", words(650), 300);
  REQUIRE(c650.size() == 3);
  CHECK(c650[0].word_end - c650[0].word_start == 300);
  CHECK(c650[1].word_end - c650[1].word_start == 300);
  CHECK(c650[2].word_end - c650[2].word_start == 50);
  CHECK(chunk_document("d", words(300), 300).size() == 1);
  CHECK(chunk_document("d", "", 300).empty());
  CHECK(chunk_document("d", " \n\t ", 300).empty());
  CHECK_THROWS_AS(chunk_document("d", "a b", 0), ConfigError);
  CHECK_THROWS_AS(chunk_document("d", "a b", 3, 3), ConfigError);

  const std::string text = "  alpha\tbeta\n\ngamma  delta epsilon ";
  const auto chunks = chunk_document("doc", text, 2);
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].text == "alpha\tbeta");
  CHECK(chunks[1].text == "gamma  delta");
  CHECK(chunks[2].text == "epsilon");
  CHECK(chunks[2].chunk_index == 2);
  CHECK(chunks[2].doc_id == "doc");

  std::string rejoined;
  for (const auto& c : c650) rejoined += c.text + " ";
  CHECK(split_words(rejoined) == split_words(words(650)));

  const auto overlapped = chunk_document("d", words(10), 4, 1);
  REQUIRE(overlapped.size() == 3);
  CHECK(overlapped[1].word_start == 3);
  CHECK(overlapped[2].word_end == 10);
}

TEST_CASE("build_index") {
  const auto enc = small_encoder();
  const auto one = build_index({{"a", "who teaches the course"}}, enc);
  CHECK(one.entries.size() == 1);
  CHECK(one.fingerprint == enc.fingerprint);
  CHECK(one.dim == 8);

  std::vector<Document> docs;
  std::size_t expected = 0;
  for (int i = 0; i < 28; ++i) {
    docs.push_back({"doc" + std::to_string(i), words(100 + 37 * i)});
    expected += chunk_document("", docs.back().text, 300).size();
  }
  const auto all = build_index(docs, enc);
  CHECK(all.entries.size() == expected);
  CHECK(build_index(docs, enc) == all);
  for (const auto& e : all.entries) CHECK(std::abs(norm(e.embedding) - 1.0) <= 1e-8);

  const auto skipped = build_index({{"x", "... ??? !!!"}, {"y", "credit hours"}}, enc);
  CHECK(skipped.entries.size() == 1);
  CHECK(skipped.skipped_chunks == 1);
}

TEST_CASE("top_k") {
  const auto enc = small_encoder();
  const auto index = build_index({{"a", "who teaches"}, {"b", "credit hours"}, {"c", "office ta"}}, enc);

  const auto hits = top_k(index, enc, "credit hours", 3);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].chunk.doc_id == "b");
  CHECK(hits[0].score == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hits[0].rank == 1);
  CHECK(top_k(index, enc, "credit hours", 10).size() == 3);
  for (std::size_t i = 1; i < hits.size(); ++i) CHECK(hits[i - 1].score >= hits[i].score);

  const auto filtered = top_k(index, enc, "credit hours", 3, "c");
  REQUIRE(filtered.size() == 1);
  CHECK(filtered[0].chunk.doc_id == "c");

  CHECK_THROWS_AS(top_k(index, enc, "", 3), EmptyInputError);
  CHECK_THROWS_AS(top_k(index, enc, "who", 0), ConfigError);
  CHECK_THROWS_AS(top_k(index, small_encoder(2), "who", 3), CompatibilityError);
}

TEST_CASE("top_k tie rule") {
  ChunkIndex index;
  index.dim = 2;
  const Vec e{1, 0};
  for (auto [doc, idx] : std::vector<std::pair<std::string, std::size_t>>{{"b", 0}, {"a", 2}, {"a", 1}, {"c", 0}}) {
    Chunk c;
    c.doc_id = doc;
    c.chunk_index = idx;
    index.entries.push_back({c, e});
  }
  const auto hits = top_k_vector(index, Vec{1, 0}, 4);
  REQUIRE(hits.size() == 4);
  CHECK(hits[0].chunk.doc_id == "a");
  CHECK(hits[0].chunk.chunk_index == 1);
  CHECK(hits[1].chunk.chunk_index == 2);
  CHECK(hits[2].chunk.doc_id == "b");
  CHECK(hits[3].chunk.doc_id == "c");
  CHECK_THROWS_AS(top_k_vector(index, Vec{1, 0, 0}, 1), DimensionError);
}

TEST_CASE("top_k agrees with a full sort") {
  std::mt19937_64 rng(17);
  const auto index = random_index(rng, 300, 6);
  const auto queries = testing::random_matrix(rng, 30, 6, true);
  for (std::size_t q = 0; q < queries.rows(); ++q) {
    std::vector<std::size_t> order(index.entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> scores;
    for (const auto& e : index.entries) scores.push_back(dot(queries.row(q), e.embedding));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      const auto& ca = index.entries[a].chunk;
      const auto& cb = index.entries[b].chunk;
      return std::tie(ca.doc_id, ca.chunk_index) < std::tie(cb.doc_id, cb.chunk_index);
    });
    for (std::size_t k : {1, 3, 10}) {
      const auto hits = top_k_vector(index, queries.row(q), k);
      REQUIRE(hits.size() == k);
      for (std::size_t r = 0; r < k; ++r) CHECK(hits[r].entry_index == order[r]);
    }
    const auto filtered = top_k_vector(index, queries.row(q), 10, "d2");
    for (const auto& h : filtered) CHECK(h.chunk.doc_id == "d2");
  }
}

TEST_CASE("assemble_context") {
  auto hit = [](const std::string& text) {
    RetrievalHit h;
    h.chunk.text = text;
    return h;
  };
  CHECK(assemble_context({hit("A"), hit("B"), hit("C")}) == "A\n\nB\n\nC");
  CHECK(assemble_context({hit("only one")}) == "only one");
  CHECK(assemble_context({}).empty());
}

TEST_CASE("index persistence") {
  const auto dir = testing::temp_dir("index");
  const auto enc = small_encoder();
  const auto index = build_index({{"a", words(500)}, {"b", "who teaches the course"}}, enc);
  save_index(dir / "x.idx", index);
  const auto loaded = load_index(dir / "x.idx");
  CHECK(loaded.entries.size() == index.entries.size());
  CHECK(loaded.fingerprint == index.fingerprint);
  CHECK(loaded.dim == index.dim);
  for (std::size_t i = 0; i < index.entries.size(); ++i) {
    CHECK(loaded.entries[i].chunk == index.entries[i].chunk);
    for (std::size_t j = 0; j < index.dim; ++j) {
      CHECK(loaded.entries[i].embedding[j] == static_cast<double>(static_cast<float>(index.entries[i].embedding[j])));
    }
  }
  save_index(dir / "y.idx", loaded);
  CHECK(read_file(dir / "x.idx") == read_file(dir / "y.idx"));
  CHECK(top_k(loaded, enc, "who teaches", 1)[0].chunk.doc_id == "b");

  const auto bytes = read_file(dir / "x.idx");
  write_file_atomic(dir / "trunc.idx", bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(load_index(dir / "trunc.idx"), CorruptionError);

  auto header_end = bytes.find('\n');
  auto header = nlohmann::json::parse(bytes.substr(0, header_end));
  header["version"] = 99;
  write_file_atomic(dir / "ver.idx", header.dump() + bytes.substr(header_end));
  CHECK_THROWS_AS(load_index(dir / "ver.idx"), VersionError);
  write_file_atomic(dir / "junk.idx", "not json\n");
  CHECK_THROWS_AS(load_index(dir / "junk.idx"), ParseError);
}

TEST_CASE("load_documents") {
  const auto dir = testing::temp_dir("docs");
  std::ofstream(dir / "b.txt") << "second";
  std::ofstream(dir / "a.txt") << "first";
  std::ofstream(dir / "notes.md") << "ignored";
  const auto docs = load_documents(dir);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_id == "a");
  CHECK(docs[0].text == "first");
  CHECK(docs[1].doc_id == "b");
  CHECK_THROWS_AS(load_documents(dir / "missing"), IoError);
}
