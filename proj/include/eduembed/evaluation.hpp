#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eduembed/retrieval.hpp"

namespace eduembed {

enum class Category { course_info, faculty_info, ta_info };

std::string to_string(Category c);
Category parse_category(const std::string& text);

struct Question {
  Category category;
  std::string text;
};

struct QuestionSet {
  std::vector<Question> entries;

  /// The ten benchmark phrasings: three course, three faculty, four TA.
  static QuestionSet defaults();
};

/// JSON-lines {"category": str, "question": str}.
QuestionSet load_questions(const std::filesystem::path& path);

using GoldField = std::optional<std::vector<std::string>>;  // nullopt: fact absent from the doc

struct GoldRecord {
  std::string doc_id;
  GoldField credit_hours;
  std::vector<std::string> instructor;
  GoldField ta;

  GoldField field(Category c) const;
  friend bool operator==(const GoldRecord&, const GoldRecord&) = default;
};

/// JSON array of {"doc_id", "credit_hours": [..]|null, "instructor": [..], "ta": [..]|null}.
std::vector<GoldRecord> load_gold(const std::filesystem::path& path);
void save_gold(const std::filesystem::path& path, const std::vector<GoldRecord>& records);
nlohmann::json gold_to_json(const std::vector<GoldRecord>& records);
std::vector<GoldRecord> gold_from_json(const nlohmann::json& j);

inline constexpr const char* kRefusalAnswer = "Sorry, I don't know";
inline constexpr const char* kRemoteSystemPrompt =
    "Answer strictly from the provided context. If the context does not contain the answer, "
    "reply exactly: Sorry, I don't know.";

/// Lowercase, punctuation to spaces, whitespace collapsed and trimmed.
std::string normalize_text(const std::string& text);

enum class Verdict { valid, invalid, errored };
std::string to_string(Verdict v);

struct GradeOptions {
  std::vector<std::string> refusal_markers{"sorry i don t know"};  // normalized form
};

/// Present gold: valid iff some normalized alternative is a substring of the normalized
/// answer. Absent gold: valid iff the answer contains a refusal marker.
Verdict grade_answer(const std::string& answer, const GoldField& gold,
                     const GradeOptions& options = {});

struct RetrievalOutcome {
  bool hit = false;
  std::optional<std::size_t> first_hit_rank;  // 1-based
};

/// Whether any hit's text contains a gold alternative (same normalization as grading).
RetrievalOutcome retrieval_hit(const std::vector<RetrievalHit>& hits,
                               const std::vector<std::string>& gold);

class AnswerBackend {
 public:
  virtual ~AnswerBackend() = default;
  virtual std::string name() const = 0;
  virtual std::string answer(const std::string& context, const std::string& question) const = 0;
};

/// Offline answerer: returns the context sentence sharing the most content tokens with
/// the question, or the refusal phrase when nothing overlaps. Question-frame words are
/// ignored and a few metadata synonyms (professor/instructor, TA/assistant, ...) are
/// folded together before counting.
class ExtractiveBackend final : public AnswerBackend {
 public:
  std::string name() const override { return "extractive"; }
  std::string answer(const std::string& context, const std::string& question) const override;
};

/// Sentences of a context, split at line breaks and at . ! ? followed by whitespace,
/// except after common title abbreviations (Dr., Prof., ...) and single initials.
std::vector<std::string> split_sentences(const std::string& text);

struct RemoteConfig {
  std::string endpoint;  // e.g. http://localhost:8000/v1/chat/completions
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "EDU_EMBED_API_KEY";
  double timeout_seconds = 30.0;
};

/// Chat-completion client. Errors are TimeoutError, HttpStatusError,
/// MalformedResponseError or NetworkError; there is no fallback.
class RemoteBackend final : public AnswerBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  std::string name() const override { return "remote"; }
  std::string answer(const std::string& context, const std::string& question) const override;

 private:
  RemoteConfig config_;
};

nlohmann::json build_chat_request(const std::string& model, const std::string& context,
                                  const std::string& question);
std::string parse_chat_response(const std::string& body);

std::string generate_answer(const AnswerBackend& backend, const std::string& context,
                            const std::string& question);

struct CellTrace {
  std::string doc_id;
  Category category = Category::course_info;
  std::size_t question_index = 0;
  std::string question;
  std::vector<RetrievalHit> hits;
  std::string answer;
  Verdict verdict = Verdict::invalid;
  bool gold_present = false;
  RetrievalOutcome retrieval;
  std::string error;
};

struct CategorySummary {
  std::size_t cells = 0;
  std::size_t valid = 0;
  std::size_t errored = 0;
  std::size_t retrieval_cells = 0;  // cells with gold present
  std::size_t hits = 0;
  std::size_t rank1 = 0;
  double reciprocal_rank_sum = 0.0;

  double accuracy() const { return cells ? static_cast<double>(valid) / cells : 0.0; }
  double hit_at_k() const { return retrieval_cells ? static_cast<double>(hits) / retrieval_cells : 0.0; }
  double recall_at_1() const { return retrieval_cells ? static_cast<double>(rank1) / retrieval_cells : 0.0; }
  double mrr() const { return retrieval_cells ? reciprocal_rank_sum / retrieval_cells : 0.0; }
};

struct EvalReport {
  std::string model_label;
  std::string backend;
  std::size_t k = 3;
  std::size_t docs = 0;
  std::map<Category, CategorySummary> categories;
  std::vector<CellTrace> traces;  // sorted by (doc_id, category, question_index)

  nlohmann::json summary_json() const;
  std::string traces_jsonl() const;
};

struct BenchmarkOptions {
  std::size_t k = 3;
  std::size_t concurrency = 1;
  std::string model_label = "model";
  GradeOptions grading;
};

/// Per (doc, question) cell: top-k within that doc, context, answer, grade.
EvalReport run_benchmark(const ChunkIndex& index, const Encoder& encoder,
                         const QuestionSet& questions, const std::vector<GoldRecord>& gold,
                         const AnswerBackend& backend, const BenchmarkOptions& options = {});

}  // namespace eduembed
