#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eduembed/dataset.hpp"
#include "eduembed/evaluation.hpp"
#include "eduembed/retrieval.hpp"

namespace eduembed {

enum class TemplateForm {
  question,   // "Who teaches {course}?"
  sentence,   // "{course} is taught by {instructor}."
  label,      // "Instructor: {instructor} ({course})"
};

struct Template {
  std::string text;  // may contain {course} {instructor} {ta} {time} {credits} {room} {date}
  TemplateForm form;
};

/// One syllabus fact type with interchangeable question and statement phrasings.
struct Concept {
  std::string name;
  std::vector<Template> questions;
  std::vector<Template> statements;
};

enum class PairFamily {
  synonym_substitution,  // statement<->statement or question<->question
  question_statement,    // question -> full-sentence statement
  implicit_explicit,     // question -> "Label: value" statement
};

std::string to_string(PairFamily f);

struct EntityPools {
  std::vector<std::string> departments;
  std::vector<std::string> course_numbers;
  std::vector<std::string> heldout_departments;  // disjoint from `departments`
  std::vector<std::string> heldout_numbers;
  std::vector<std::string> titles;
  std::vector<std::string> instructors;
  std::vector<std::string> tas;
  std::vector<std::string> times;
  std::vector<std::string> credits;
  std::vector<std::string> rooms;
  std::vector<std::string> dates;
};

struct SynthSpec {
  std::uint64_t seed = 42;
  std::size_t n_positive = 256;
  std::size_t n_negative = 64;
  bool reuse_positives_as_labeled = true;
  std::size_t training_courses = 40;
  std::size_t heldout_courses = 8;
  std::size_t fixture_docs = 4;
  EntityPools pools;
  std::vector<Concept> concepts;

  /// Built-in pools and the six syllabus concepts.
  static SynthSpec defaults(std::uint64_t seed = 42, std::size_t n_positive = 256,
                            std::size_t n_negative = 64);
};

struct CourseFacts {
  std::string code;
  std::string title;
  std::string instructor;
  std::string ta;
  std::string time;
  std::string credits;
  std::string room;
  std::string date;

  /// Tokens of every slot value; the only tokens zero-overlap pairs may share.
  std::vector<std::string> entity_tokens() const;
};

std::string fill_template(const std::string& text, const CourseFacts& facts);

struct EvalFixtures {
  std::vector<Document> docs;
  std::vector<GoldRecord> gold;
};

struct SynthCorpus {
  std::vector<SentencePair> positives;
  std::vector<PairFamily> positive_families;  // parallel to `positives`
  std::vector<LabeledPair> labeled;           // negatives (0) then reused positives (1)
  std::vector<SentencePair> heldout_positives;  // zero-overlap paraphrases, course-major, one per concept
  std::vector<LabeledPair> heldout_labeled;
  EvalFixtures fixtures;
};

/// Pure function of the spec. Throws CapacityError when the template space cannot
/// supply the requested number of distinct pairs.
SynthCorpus generate_synthetic(const SynthSpec& spec);

/// Writes pairs.jsonl, labeled.jsonl, heldout_pairs.jsonl, heldout_labeled.jsonl,
/// docs/<doc_id>.txt and gold.json under `dir`.
void write_synthetic(const std::filesystem::path& dir, const SynthCorpus& corpus);

/// Content tokens shared by the two sides once entity tokens are removed.
std::vector<std::string> non_entity_overlap(const std::string& a, const std::string& b,
                                            const std::vector<std::string>& entity_tokens);

}  // namespace eduembed
