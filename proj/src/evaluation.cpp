#include "eduembed/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "eduembed/encoder.hpp"
#include "eduembed/errors.hpp"
#include "eduembed/persistence.hpp"

namespace eduembed {

using nlohmann::json;

std::string to_string(Category c) {
  switch (c) {
    case Category::course_info: return "course_info";
    case Category::faculty_info: return "faculty_info";
    case Category::ta_info: return "ta_info";
  }
  return "unknown";
}

Category parse_category(const std::string& text) {
  if (text == "course_info") return Category::course_info;
  if (text == "faculty_info") return Category::faculty_info;
  if (text == "ta_info") return Category::ta_info;
  throw ValidationError("unknown question category '" + text + "'");
}

QuestionSet QuestionSet::defaults() {
  return {{
      {Category::course_info, "How many credit hours is this course worth?"},
      {Category::course_info, "What are the semester hours for this course?"},
      {Category::course_info, "What is the credit hour value of this course?"},
      {Category::faculty_info, "What is the name of the instructor?"},
      {Category::faculty_info, "What is the professor's name?"},
      {Category::faculty_info, "What is the lecturer's name?"},
      {Category::ta_info, "What is the name of the TA?"},
      {Category::ta_info, "What are the TA's name?"},
      {Category::ta_info, "What is the name of the Teaching Assistant?"},
      {Category::ta_info, "What are the Teaching Assistant's name?"},
  }};
}

QuestionSet load_questions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  QuestionSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      Question q{parse_category(j.at("category").get<std::string>()),
                 j.at("question").get<std::string>()};
      if (tokenize(q.text).empty()) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": empty question");
      }
      set.entries.push_back(std::move(q));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return set;
}

GoldField GoldRecord::field(Category c) const {
  switch (c) {
    case Category::course_info: return credit_hours;
    case Category::faculty_info: return instructor;
    case Category::ta_info: return ta;
  }
  return std::nullopt;
}

namespace {

GoldField parse_gold_field(const json& record, const char* key, bool nullable) {
  auto it = record.find(key);
  if (it == record.end()) throw ParseError(std::string("gold record missing \"") + key + "\"");
  if (it->is_null()) {
    if (!nullable) throw ValidationError(std::string("gold field \"") + key + "\" cannot be null");
    return std::nullopt;
  }
  auto values = it->get<std::vector<std::string>>();
  if (values.empty()) {
    throw ValidationError(std::string("gold field \"") + key +
                          "\" is an empty list (use null for an absent fact)");
  }
  return values;
}

json gold_field_json(const GoldField& f) { return f ? json(*f) : json(nullptr); }

}  // namespace

std::vector<GoldRecord> gold_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("gold file must hold a JSON array");
  std::vector<GoldRecord> out;
  std::set<std::string> seen;
  try {
    for (const auto& r : j) {
      GoldRecord g;
      g.doc_id = r.at("doc_id").get<std::string>();
      g.credit_hours = parse_gold_field(r, "credit_hours", true);
      g.instructor = *parse_gold_field(r, "instructor", false);
      g.ta = parse_gold_field(r, "ta", true);
      if (!seen.insert(g.doc_id).second) throw ValidationError("duplicate gold doc_id " + g.doc_id);
      out.push_back(std::move(g));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("gold file: ") + e.what());
  }
  return out;
}

json gold_to_json(const std::vector<GoldRecord>& records) {
  json arr = json::array();
  for (const auto& g : records) {
    arr.push_back({{"doc_id", g.doc_id},
                   {"credit_hours", gold_field_json(g.credit_hours)},
                   {"instructor", g.instructor},
                   {"ta", gold_field_json(g.ta)}});
  }
  return arr;
}

std::vector<GoldRecord> load_gold(const std::filesystem::path& path) {
  try {
    return gold_from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_gold(const std::filesystem::path& path, const std::vector<GoldRecord>& records) {
  write_file_atomic(path, gold_to_json(records).dump(2) + "\n");
}

std::string normalize_text(const std::string& text) {
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::valid: return "valid";
    case Verdict::invalid: return "invalid";
    case Verdict::errored: return "errored";
  }
  return "unknown";
}

Verdict grade_answer(const std::string& answer, const GoldField& gold, const GradeOptions& options) {
  const std::string normalized = normalize_text(answer);
  if (!gold) {
    for (const auto& marker : options.refusal_markers) {
      const auto m = normalize_text(marker);
      if (!m.empty() && normalized.find(m) != std::string::npos) return Verdict::valid;
    }
    return Verdict::invalid;
  }
  for (const auto& alt : *gold) {
    const auto g = normalize_text(alt);
    if (!g.empty() && normalized.find(g) != std::string::npos) return Verdict::valid;
  }
  return Verdict::invalid;
}

RetrievalOutcome retrieval_hit(const std::vector<RetrievalHit>& hits,
                               const std::vector<std::string>& gold) {
  std::vector<std::string> alts;
  for (const auto& g : gold) {
    auto n = normalize_text(g);
    if (!n.empty()) alts.push_back(std::move(n));
  }
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const auto text = normalize_text(hits[i].chunk.text);
    for (const auto& a : alts) {
      if (text.find(a) != std::string::npos) return {true, hits[i].rank ? hits[i].rank : i + 1};
    }
  }
  return {};
}

// --- extractive backend ---------------------------------------------------

namespace {

const std::unordered_set<std::string>& frame_words() {
  static const std::unordered_set<std::string> words{
      "a",    "an",   "and",   "are",  "be",    "by",   "can",  "could", "did",  "do",
      "does", "for",  "from",  "has",  "have",  "how",  "i",    "in",    "is",   "it",
      "its",  "many", "much",  "my",   "name",  "names", "of",  "on",    "or",   "our",
      "s",    "t",    "that",  "the",  "their", "there", "this", "to",   "was",  "we",
      "were", "what", "when",  "where", "which", "who",  "whom", "whose", "why", "will",
      "with", "you",  "your"};
  return words;
}

const std::unordered_map<std::string, std::string>& synonym_classes() {
  static const std::unordered_map<std::string, std::string> classes{
      {"instructor", "instructor"}, {"instructors", "instructor"},
      {"professor", "instructor"},  {"professors", "instructor"},
      {"prof", "instructor"},       {"lecturer", "instructor"},
      {"lecturers", "instructor"},  {"faculty", "instructor"},
      {"teacher", "instructor"},    {"ta", "ta"},
      {"tas", "ta"},                {"assistant", "ta"},
      {"assistants", "ta"},         {"credit", "credit"},
      {"credits", "credit"},        {"semester", "credit"},
      {"unit", "credit"},           {"units", "credit"},
      {"hour", "hours"},            {"hours", "hours"},
  };
  return classes;
}

std::string canonical(const std::string& token) {
  const auto& classes = synonym_classes();
  auto it = classes.find(token);
  return it == classes.end() ? token : it->second;
}

std::set<std::string> content_terms(const std::string& text, bool drop_frame_words) {
  std::set<std::string> terms;
  for (const auto& t : tokenize(text)) {
    if (drop_frame_words && frame_words().count(t)) continue;
    terms.insert(canonical(t));
  }
  return terms;
}

bool is_abbreviation(const std::string& word) {
  static const std::unordered_set<std::string> abbrevs{"dr", "prof", "mr", "mrs", "ms",
                                                       "st", "jr", "sr", "vs", "etc",
                                                       "no", "e.g", "i.e"};
  std::string w;
  for (char c : word) w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (w.size() == 1 && std::isalpha(static_cast<unsigned char>(w[0]))) return true;
  return abbrevs.count(w) > 0;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string current;
  auto flush = [&] {
    auto t = trim(current);
    if (!t.empty()) sentences.push_back(std::move(t));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      flush();
      continue;
    }
    current.push_back(c);
    if (c != '.' && c != '!' && c != '?') continue;
    const bool at_boundary = i + 1 == text.size() ||
                             std::isspace(static_cast<unsigned char>(text[i + 1])) != 0;
    if (!at_boundary) continue;
    if (c == '.') {
      // the word just before the period
      std::size_t end = current.size() - 1;
      std::size_t start = end;
      while (start > 0 && !std::isspace(static_cast<unsigned char>(current[start - 1]))) --start;
      std::string word = current.substr(start, end - start);
      while (!word.empty() && !std::isalnum(static_cast<unsigned char>(word.front()))) {
        word.erase(word.begin());
      }
      if (is_abbreviation(word)) continue;
    }
    flush();
  }
  flush();
  return sentences;
}

std::string ExtractiveBackend::answer(const std::string& context, const std::string& question) const {
  const auto wanted = content_terms(question, true);
  std::size_t best_overlap = 0;
  std::string best;
  for (const auto& sentence : split_sentences(context)) {
    const auto have = content_terms(sentence, false);
    std::size_t overlap = 0;
    for (const auto& w : wanted) overlap += have.count(w);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = sentence;
    }
  }
  return best_overlap == 0 ? std::string(kRefusalAnswer) : best;
}

json build_chat_request(const std::string& model, const std::string& context,
                        const std::string& question) {
  return {{"model", model},
          {"messages",
           json::array({{{"role", "system"}, {"content", kRemoteSystemPrompt}},
                        {{"role", "user"}, {"content", context + "\n\nQuestion: " + question}}})}};
}

std::string parse_chat_response(const std::string& body) {
  try {
    const json j = json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw MalformedResponseError("message content is not a string");
    return trim(content.get<std::string>());
  } catch (const json::exception& e) {
    throw MalformedResponseError(std::string("malformed chat-completion response: ") + e.what());
  }
}

std::string generate_answer(const AnswerBackend& backend, const std::string& context,
                            const std::string& question) {
  if (tokenize(question).empty()) throw EmptyInputError("question has no tokens");
  return backend.answer(context, question);
}

// --- benchmark ------------------------------------------------------------

json EvalReport::summary_json() const {
  json cats = json::object();
  for (const auto& [cat, s] : categories) {
    json entry = {{"cells", s.cells},
                  {"valid", s.valid},
                  {"errored", s.errored},
                  {"accuracy", s.accuracy()},
                  {"retrieval_cells", s.retrieval_cells}};
    if (s.retrieval_cells) {
      entry["hit_at_k"] = s.hit_at_k();
      entry["recall_at_1"] = s.recall_at_1();
      entry["mrr"] = s.mrr();
    } else {
      entry["hit_at_k"] = nullptr;
      entry["recall_at_1"] = nullptr;
      entry["mrr"] = nullptr;
    }
    cats[to_string(cat)] = std::move(entry);
  }
  return {{"model", model_label},
          {"backend", backend},
          {"k", k},
          {"docs", docs},
          {"cells", traces.size()},
          {"categories", cats}};
}

std::string EvalReport::traces_jsonl() const {
  std::string out;
  for (const auto& t : traces) {
    json hits = json::array();
    for (const auto& h : t.hits) {
      hits.push_back({{"doc_id", h.chunk.doc_id},
                      {"chunk_index", h.chunk.chunk_index},
                      {"rank", h.rank},
                      {"score", h.score}});
    }
    json line = {{"doc_id", t.doc_id},
                 {"category", to_string(t.category)},
                 {"question_index", t.question_index},
                 {"question", t.question},
                 {"retrieved", hits},
                 {"answer", t.answer},
                 {"verdict", to_string(t.verdict)},
                 {"gold_present", t.gold_present},
                 {"first_hit_rank", t.retrieval.first_hit_rank ? json(*t.retrieval.first_hit_rank)
                                                               : json(nullptr)}};
    if (!t.error.empty()) line["error"] = t.error;
    out += line.dump();
    out += '\n';
  }
  return out;
}

EvalReport run_benchmark(const ChunkIndex& index, const Encoder& encoder,
                         const QuestionSet& questions, const std::vector<GoldRecord>& gold,
                         const AnswerBackend& backend, const BenchmarkOptions& options) {
  if (options.k < 1) throw ConfigError("k must be at least 1");
  if (encoder.fingerprint != index.fingerprint) {
    throw CompatibilityError("index and encoder fingerprints differ");
  }
  std::set<std::string> indexed_docs;
  for (const auto& e : index.entries) indexed_docs.insert(e.chunk.doc_id);
  for (const auto& g : gold) {
    if (!indexed_docs.count(g.doc_id)) {
      throw ValidationError("gold doc_id '" + g.doc_id + "' has no indexed chunks");
    }
  }

  std::vector<CellTrace> cells;
  for (const auto& g : gold) {
    for (std::size_t q = 0; q < questions.entries.size(); ++q) {
      CellTrace c;
      c.doc_id = g.doc_id;
      c.category = questions.entries[q].category;
      c.question_index = q;
      c.question = questions.entries[q].text;
      cells.push_back(std::move(c));
    }
  }
  std::unordered_map<std::string, const GoldRecord*> gold_by_doc;
  for (const auto& g : gold) gold_by_doc[g.doc_id] = &g;

  auto evaluate = [&](CellTrace& c) {
    const GoldField field = gold_by_doc.at(c.doc_id)->field(c.category);
    c.gold_present = field.has_value();
    c.hits = top_k(index, encoder, c.question, options.k, c.doc_id);
    if (field) c.retrieval = retrieval_hit(c.hits, *field);
    try {
      c.answer = generate_answer(backend, assemble_context(c.hits), c.question);
      c.verdict = grade_answer(c.answer, field, options.grading);
    } catch (const NetworkError& e) {
      c.verdict = Verdict::errored;
      c.error = e.what();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.concurrency, cells.size()));
  if (workers == 1) {
    for (auto& c : cells) evaluate(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < cells.size(); i = next++) evaluate(cells[i]);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  std::sort(cells.begin(), cells.end(), [](const CellTrace& a, const CellTrace& b) {
    if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
    if (a.category != b.category) return a.category < b.category;
    return a.question_index < b.question_index;
  });

  EvalReport report;
  report.model_label = options.model_label;
  report.backend = backend.name();
  report.k = options.k;
  report.docs = gold.size();
  for (const auto& c : cells) {
    auto& s = report.categories[c.category];
    ++s.cells;
    if (c.verdict == Verdict::valid) ++s.valid;
    if (c.verdict == Verdict::errored) ++s.errored;
    if (c.gold_present) {
      ++s.retrieval_cells;
      if (c.retrieval.hit) {
        ++s.hits;
        if (*c.retrieval.first_hit_rank == 1) ++s.rank1;
        s.reciprocal_rank_sum += 1.0 / static_cast<double>(*c.retrieval.first_hit_rank);
      }
    }
  }
  report.traces = std::move(cells);
  return report;
}

}  // namespace eduembed
