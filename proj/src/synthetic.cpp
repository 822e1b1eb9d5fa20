#include "eduembed/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "eduembed/encoder.hpp"
#include "eduembed/errors.hpp"
#include "eduembed/persistence.hpp"

namespace eduembed {

std::string to_string(PairFamily f) {
  switch (f) {
    case PairFamily::synonym_substitution: return "synonym_substitution";
    case PairFamily::question_statement: return "question_statement";
    case PairFamily::implicit_explicit: return "implicit_explicit";
  }
  return "unknown";
}

namespace {

using F = TemplateForm;

std::vector<Concept> default_concepts() {
  return {
      {"instructor",
       {{"Who teaches {course}?", F::question},
        {"What is the name of the instructor for {course}?", F::question},
        {"What is the professor's name in {course}?", F::question},
        {"Who is the lecturer of {course}?", F::question},
        {"Which faculty member runs {course}?", F::question}},
       {{"Instructor: {instructor} ({course})", F::label},
        {"{course} Professor: {instructor}", F::label},
        {"{course} is taught by {instructor}.", F::sentence},
        {"{instructor} lectures in {course} this term.", F::sentence},
        {"{course} Lecturer: {instructor}", F::label}}},
      {"ta",
       {{"Who is the TA for {course}?", F::question},
        {"What is the name of the teaching assistant in {course}?", F::question},
        {"What are the TA's names for {course}?", F::question},
        {"Who helps grade {course} homework?", F::question}},
       {{"Teaching Assistant: {ta} ({course})", F::label},
        {"{course} TA: {ta}", F::label},
        {"{ta} is the teaching assistant for {course}.", F::sentence},
        {"{course} grading support comes from {ta}.", F::sentence}}},
      {"office_hours",
       {{"When are the professor's office hours for {course}?", F::question},
        {"What time can I meet the instructor of {course}?", F::question},
        {"When can students drop by to talk about {course}?", F::question}},
       {{"Office Hours: {time} ({course})", F::label},
        {"The professor's office hours for {course} are at {time}.", F::sentence},
        {"Drop-in consultations for {course} run {time}.", F::sentence},
        {"{course} walk-in availability: {time}", F::label}}},
      {"credit_hours",
       {{"How many credit hours is {course} worth?", F::question},
        {"What are the semester hours for {course}?", F::question},
        {"What is the credit hour value of {course}?", F::question},
        {"How many units does {course} carry?", F::question}},
       {{"Credit Hours: {credits} ({course})", F::label},
        {"{course} Semester Hours: {credits}", F::label},
        {"{course} counts for {credits} credits toward the degree.", F::sentence},
        {"Students earn {credits} units in {course}.", F::sentence}}},
      {"location",
       {{"Where does {course} meet?", F::question},
        {"Which room is {course} held in?", F::question},
        {"What is the classroom for {course}?", F::question}},
       {{"Location: {room} ({course})", F::label},
        {"{course} lectures take place in {room}.", F::sentence},
        {"{course} Classroom: {room}", F::label}}},
      {"final_exam",
       {{"When is the final exam for {course}?", F::question},
        {"What date is the {course} final?", F::question},
        {"When do we sit the last test in {course}?", F::question}},
       {{"Final Exam: {date} ({course})", F::label},
        {"The {course} end-of-term assessment is on {date}.", F::sentence},
        {"{course} closes with a cumulative examination {date}.", F::sentence}}},
  };
}

EntityPools default_pools() {
  EntityPools p;
  p.departments = {"BIO", "CHEM", "PHYS", "MATH", "CS", "PSY", "ANTH", "EDU", "ENGR", "HIST", "ECON", "SOC"};
  p.course_numbers = {"101", "110", "150", "201", "210", "220", "301", "310", "320", "401"};
  p.heldout_departments = {"ASTR", "GEOL", "LING", "MUS", "PHIL", "ARTH", "NURS", "STAT"};
  p.heldout_numbers = {"115", "225", "335", "445", "155", "265", "375", "485"};
  p.titles = {"Introduction to Cell Biology", "Organic Chemistry", "Classical Mechanics",
              "Linear Algebra", "Data Structures", "Cognitive Psychology",
              "Cultural Anthropology", "Learning Sciences", "Engineering Design",
              "Modern World History", "Principles of Microeconomics", "Social Theory"};
  p.instructors = {"Dr. Smith",  "Dr. Garcia", "Dr. Nguyen", "Dr. Patel",  "Dr. Okafor",
                   "Dr. Kim",    "Dr. Rossi",  "Dr. Novak",  "Dr. Haddad", "Dr. Larsen",
                   "Dr. Mendes", "Dr. Tanaka", "Dr. Brennan", "Dr. Osei",  "Dr. Ivanova",
                   "Dr. Fischer"};
  p.tas = {"Maria Lopez",  "Kevin Park",    "Aisha Bello",   "Tom Becker",
           "Priya Raman",  "Lucas Moreau",  "Hana Sato",     "Diego Alvarez",
           "Nora Quinn",   "Samir Aziz",    "Elena Petrova", "Jonah Reyes",
           "Grace Mwangi", "Oliver Strand", "Mei Chen",      "Rafael Costa"};
  p.times = {"Mondays 3 PM",     "Tuesdays 10 AM",  "Wednesdays 1 PM", "Thursdays 4 PM",
             "Fridays 11 AM",    "Mondays 9 AM",    "Tuesdays 2 PM",   "Thursdays 10 AM"};
  p.credits = {"1", "2", "3", "4", "5"};
  p.rooms = {"Science Hall 120", "Library 204", "Engineering Annex 310", "Gibson Hall 105",
             "Richardson Building 212", "Stern Center 018"};
  p.dates = {"December 9", "December 12", "May 6", "May 10", "August 2", "April 28"};
  return p;
}

// Filler paragraphs for mini-syllabi, free of staff and workload vocabulary.
const std::vector<std::pair<std::string, std::vector<std::string>>>& filler_sections() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> sections{
      {"Course Description",
       {"This course surveys the core ideas of the field and connects them to current research.",
        "Students will read primary sources and discuss them in small groups each week.",
        "Lectures introduce new material while discussion sections focus on applying it.",
        "We begin with foundational concepts and gradually move toward open problems.",
        "Case studies drawn from recent publications illustrate how methods are used in practice.",
        "The material assumes comfort with basic algebra and careful reading of technical prose.",
        "Several sessions are devoted to reviewing common misconceptions and how to avoid them.",
        "Guest speakers may visit to describe how these topics shape their professional work.",
        "By the end of the term you should be able to explain the main results in your own words.",
        "Short reflective writing is used to check understanding before each major topic."}},
      {"Learning Outcomes",
       {"Explain the central principles covered in lecture using precise vocabulary.",
        "Apply standard analytical methods to unfamiliar problems and justify each step.",
        "Evaluate published arguments and identify hidden assumptions in their reasoning.",
        "Communicate findings clearly in both written reports and short oral presentations.",
        "Collaborate with classmates to design, run, and critique a small investigation.",
        "Use appropriate software tools to organize data and produce clear figures.",
        "Relate the topics of this course to questions raised in neighboring disciplines.",
        "Reflect on ethical considerations that arise when results affect real communities."}},
      {"Required Materials",
       {"The main textbook is available at the campus bookstore and through the library reserve desk.",
        "Additional readings will be posted to the learning management system every Friday.",
        "A basic scientific calculator is required for quizzes and the midterm.",
        "Laptops are welcome during workshops but should stay closed during discussion.",
        "Lab notebooks must be bound and written in ink so that entries cannot be altered.",
        "Open access articles are linked from the weekly schedule page.",
        "Students may use either the current or the previous edition of the textbook."}},
      {"Course Details",
       {"The class meets twice a week for lecture and once a week for a discussion section.",
        "There are no formal prerequisites, although prior exposure to statistics is helpful.",
        "This course satisfies the quantitative reasoning requirement for most majors.",
        "Enrollment is capped to keep discussion sections small and interactive.",
        "Auditing is permitted with written approval from the department office.",
        "The weekly schedule may shift slightly if guest speakers become available."}},
      {"Grading Policy",
       {"Homework assignments count for thirty percent of the final grade.",
        "Two midterm examinations together count for thirty percent of the final grade.",
        "The cumulative final examination counts for twenty five percent of the final grade.",
        "Participation in discussion sections makes up the remaining fifteen percent.",
        "Late homework loses ten percent of its value for each day past the deadline.",
        "The lowest quiz score is dropped automatically at the end of the term.",
        "Regrade requests must be submitted in writing within one week of the graded work being returned.",
        "Letter grades follow the standard scale published by the registrar.",
        "Extra practice problems are provided but do not count toward the final grade."}},
      {"Attendance and Participation",
       {"Regular attendance is expected and strongly correlated with success in the class.",
        "Please notify the department office in advance if you must miss an examination.",
        "Participation is assessed through preparation, engagement, and respectful discussion.",
        "Excused absences require documentation submitted within three days.",
        "Arriving late disrupts discussion, so please plan to be seated before the start.",
        "Phones should be silenced for the duration of every session.",
        "Missed quizzes cannot be made up unless the absence was excused in advance."}},
      {"Course Staff",
       {"Questions about homework logistics should be posted on the class discussion board first.",
        "Replies to messages are usually sent within two business days.",
        "Please include the course code in the subject line of every message.",
        "Grading questions are handled in person rather than by message.",
        "Review sessions are scheduled before each midterm and announced in class."}},
      {"Academic Integrity",
       {"All submitted work must be your own unless collaboration is explicitly allowed.",
        "Plagiarism and unauthorized collaboration are reported to the honor council.",
        "When in doubt about what is permitted, ask before you submit the work.",
        "Citing sources correctly is required for every written assignment.",
        "Generative tools may be used for brainstorming only when the assignment says so.",
        "Sharing examination questions with students in later sections is a violation of the honor code.",
        "Penalties range from a zero on the assignment to failure of the class."}},
      {"Accessibility",
       {"Students who need accommodations should contact the disability services office early in the term.",
        "Accommodation letters should be shared at least one week before the first examination.",
        "All course videos include captions and transcripts.",
        "Please reach out if any material is difficult to access in its current format.",
        "Wellness resources and counseling services are available to every enrolled student."}},
  };
  return sections;
}

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform_below(engine, n)); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v.at(below(v.size())); }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }
};

std::vector<std::string> template_tokens(const std::string& text) {
  std::string stripped;
  bool in_slot = false;
  for (char c : text) {
    if (c == '{') in_slot = true;
    if (!in_slot) stripped.push_back(c);
    else if (c == '}') {
      in_slot = false;
      stripped.push_back(' ');
    }
  }
  return tokenize(stripped);
}

bool templates_disjoint(const Template& a, const Template& b) {
  const auto ta = template_tokens(a.text);
  const auto tb = template_tokens(b.text);
  const std::set<std::string> sa(ta.begin(), ta.end());
  return std::none_of(tb.begin(), tb.end(), [&](const std::string& t) { return sa.count(t) > 0; });
}

struct QsCombo {
  std::size_t question;
  std::size_t statement;
};

// Zero-overlap (question, statement) combinations reserved for the held-out split:
// every other disjoint combination, starting with the first.
std::vector<QsCombo> heldout_combos(const Concept& topic) {
  std::vector<QsCombo> disjoint;
  for (std::size_t q = 0; q < topic.questions.size(); ++q) {
    for (std::size_t s = 0; s < topic.statements.size(); ++s) {
      if (templates_disjoint(topic.questions[q], topic.statements[s])) disjoint.push_back({q, s});
    }
  }
  std::vector<QsCombo> reserved;
  for (std::size_t i = 0; i < disjoint.size(); i += 2) reserved.push_back(disjoint[i]);
  if (reserved.empty()) {
    throw CapacityError("topic '" + topic.name + "' has no zero-overlap question/statement pair");
  }
  return reserved;
}

CourseFacts draw_facts(Rng& rng, const EntityPools& pools, std::string code) {
  CourseFacts f;
  f.code = std::move(code);
  f.title = rng.pick(pools.titles);
  f.instructor = rng.pick(pools.instructors);
  f.ta = rng.pick(pools.tas);
  f.time = rng.pick(pools.times);
  f.credits = rng.pick(pools.credits);
  f.room = rng.pick(pools.rooms);
  f.date = rng.pick(pools.dates);
  return f;
}

struct Candidate {
  std::string a;
  std::string b;
  PairFamily family;
};

void dedupe_preserving_order(std::vector<Candidate>& items) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<Candidate> out;
  for (auto& c : items) {
    if (seen.emplace(c.a, c.b).second) out.push_back(std::move(c));
  }
  items = std::move(out);
}

PairFamily question_family(const Template& statement) {
  return statement.form == TemplateForm::label ? PairFamily::implicit_explicit
                                               : PairFamily::question_statement;
}

std::string join_paragraph(Rng& rng, const std::vector<std::string>& pool, std::size_t count) {
  std::vector<std::string> sentences = pool;
  rng.shuffle(sentences);
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out += ' ';
    out += sentences[i % sentences.size()];
  }
  return out;
}

struct FixtureStyle {
  const char* instructor_label;
  const char* credit_label;
  const char* ta_label;
  bool has_ta;
};

EvalFixtures make_fixtures(Rng& rng, const std::vector<CourseFacts>& courses) {
  static const FixtureStyle styles[] = {
      {"Instructor", "Credit Hours", "Teaching Assistant", true},
      {"Professor", "Semester Hours", "TA", true},
      {"Lecturer", "Credit Hours", "Teaching Assistant", false},
      {"Instructor", "Semester Credit Hours", "Teaching Assistant (TA)", true},
  };
  EvalFixtures fx;
  for (std::size_t d = 0; d < courses.size(); ++d) {
    const auto& c = courses[d];
    const auto& style = styles[d % std::size(styles)];
    std::ostringstream doc;
    auto section = [&](const std::string& heading, std::size_t sentences, const std::string& fact) {
      const auto& sections = filler_sections();
      auto it = std::find_if(sections.begin(), sections.end(),
                             [&](const auto& s) { return s.first == heading; });
      doc << '\n' << heading << '\n';
      const std::size_t before = fact.empty() ? sentences : sentences / 2;
      doc << join_paragraph(rng, it->second, before) << '\n';
      if (!fact.empty()) {
        doc << fact << '\n';
        doc << join_paragraph(rng, it->second, sentences - before) << '\n';
      }
    };

    doc << c.code << ": " << c.title << '\n';
    doc << "Term: Fall 2024\n";
    doc << style.instructor_label << ": " << c.instructor << '\n';
    doc << "Office Hours: " << c.time << '\n';
    doc << "Location: " << c.room << '\n';
    section("Course Description", 10, "");
    section("Learning Outcomes", 8, "");
    section("Required Materials", 7, "");
    section("Course Details", 6, std::string(style.credit_label) + ": " + c.credits);
    section("Grading Policy", 9, "");
    section("Attendance and Participation", 7, "");
    section("Course Staff", 5, style.has_ta ? std::string(style.ta_label) + ": " + c.ta : "");
    section("Academic Integrity", 7, "");
    section("Accessibility", 5, "");
    doc << "\nFinal Exam: " << c.date << '\n';

    char id[32];
    std::snprintf(id, sizeof id, "syllabus_%02zu", d + 1);
    fx.docs.push_back({id, doc.str()});

    GoldRecord g;
    g.doc_id = id;
    std::string lowered_label = style.credit_label;
    for (char& ch : lowered_label) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    g.credit_hours = std::vector<std::string>{std::string(style.credit_label) + ": " + c.credits,
                                              c.credits + " " + lowered_label};
    const auto surname = c.instructor.substr(c.instructor.find(' ') + 1);
    g.instructor = {c.instructor, surname};
    if (style.has_ta) g.ta = std::vector<std::string>{c.ta};
    fx.gold.push_back(std::move(g));
  }
  return fx;
}

}  // namespace

std::vector<std::string> CourseFacts::entity_tokens() const {
  std::vector<std::string> out;
  for (const auto* value : {&code, &title, &instructor, &ta, &time, &credits, &room, &date}) {
    for (auto& t : tokenize(*value)) out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string fill_template(const std::string& text, const CourseFacts& f) {
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] != '{') {
      out.push_back(text[i++]);
      continue;
    }
    const auto close = text.find('}', i);
    if (close == std::string::npos) throw ValidationError("unterminated slot in template: " + text);
    const std::string slot = text.substr(i + 1, close - i - 1);
    if (slot == "course") out += f.code;
    else if (slot == "instructor") out += f.instructor;
    else if (slot == "ta") out += f.ta;
    else if (slot == "time") out += f.time;
    else if (slot == "credits") out += f.credits;
    else if (slot == "room") out += f.room;
    else if (slot == "date") out += f.date;
    else throw ValidationError("unknown template slot {" + slot + "}");
    i = close + 1;
  }
  return out;
}

std::vector<std::string> non_entity_overlap(const std::string& a, const std::string& b,
                                            const std::vector<std::string>& entity_tokens) {
  const auto ta = tokenize(a);
  const auto tb = tokenize(b);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> entities(entity_tokens.begin(), entity_tokens.end());
  std::set<std::string> shared;
  for (const auto& t : tb) {
    if (sa.count(t) && !entities.count(t)) shared.insert(t);
  }
  return {shared.begin(), shared.end()};
}

SynthSpec SynthSpec::defaults(std::uint64_t seed, std::size_t n_positive, std::size_t n_negative) {
  SynthSpec spec;
  spec.seed = seed;
  spec.n_positive = n_positive;
  spec.n_negative = n_negative;
  spec.pools = default_pools();
  spec.concepts = default_concepts();
  return spec;
}

SynthCorpus generate_synthetic(const SynthSpec& spec) {
  const auto& pools = spec.pools;
  if (spec.concepts.size() < 2) throw ConfigError("synthetic spec needs at least two concepts");
  for (const auto& c : spec.concepts) {
    if (c.questions.empty() || c.statements.empty()) {
      throw ConfigError("topic '" + c.name + "' needs question and statement templates");
    }
  }
  if (pools.departments.empty() || pools.course_numbers.empty() || pools.titles.empty() ||
      pools.instructors.empty() || pools.tas.empty() || pools.times.empty() ||
      pools.credits.empty() || pools.rooms.empty() || pools.dates.empty()) {
    throw ConfigError("synthetic entity pools must be nonempty");
  }
  if (spec.heldout_courses > std::min(pools.heldout_departments.size(), pools.heldout_numbers.size())) {
    throw CapacityError("not enough held-out course codes for " +
                        std::to_string(spec.heldout_courses) + " held-out courses");
  }

  Rng rng(spec.seed);

  std::vector<std::string> codes;
  for (const auto& d : pools.departments) {
    for (const auto& n : pools.course_numbers) codes.push_back(d + " " + n);
  }
  rng.shuffle(codes);
  if (spec.training_courses + spec.fixture_docs > codes.size()) {
    throw CapacityError("course pool holds " + std::to_string(codes.size()) + " codes, generator needs " +
                        std::to_string(spec.training_courses + spec.fixture_docs));
  }
  std::vector<CourseFacts> training, fixture_courses, heldout;
  for (std::size_t i = 0; i < spec.training_courses; ++i) training.push_back(draw_facts(rng, pools, codes[i]));
  for (std::size_t i = 0; i < spec.fixture_docs; ++i) {
    fixture_courses.push_back(draw_facts(rng, pools, codes[spec.training_courses + i]));
  }
  for (std::size_t i = 0; i < spec.heldout_courses; ++i) {
    heldout.push_back(draw_facts(rng, pools, pools.heldout_departments[i] + " " + pools.heldout_numbers[i]));
  }

  std::vector<std::vector<QsCombo>> reserved;
  for (const auto& c : spec.concepts) reserved.push_back(heldout_combos(c));
  auto is_reserved = [&](std::size_t k, std::size_t q, std::size_t s) {
    return std::any_of(reserved[k].begin(), reserved[k].end(),
                       [&](const QsCombo& r) { return r.question == q && r.statement == s; });
  };

  // Positive candidates over training courses.
  std::vector<Candidate> positives;
  for (const auto& course : training) {
    for (std::size_t k = 0; k < spec.concepts.size(); ++k) {
      const auto& topic = spec.concepts[k];
      const auto& qs = topic.questions;
      const auto& ss = topic.statements;
      for (std::size_t q = 0; q < qs.size(); ++q) {
        for (std::size_t s = 0; s < ss.size(); ++s) {
          if (is_reserved(k, q, s)) continue;
          positives.push_back({fill_template(qs[q].text, course), fill_template(ss[s].text, course),
                               question_family(ss[s])});
        }
      }
      for (std::size_t i = 0; i < qs.size(); ++i) {
        for (std::size_t j = i + 1; j < qs.size(); ++j) {
          positives.push_back({fill_template(qs[i].text, course), fill_template(qs[j].text, course),
                               PairFamily::synonym_substitution});
        }
      }
      for (std::size_t i = 0; i < ss.size(); ++i) {
        for (std::size_t j = i + 1; j < ss.size(); ++j) {
          positives.push_back({fill_template(ss[i].text, course), fill_template(ss[j].text, course),
                               PairFamily::synonym_substitution});
        }
      }
    }
  }
  dedupe_preserving_order(positives);
  if (positives.size() < spec.n_positive) {
    throw CapacityError("template space supports " + std::to_string(positives.size()) +
                        " positive pairs, spec asks for " + std::to_string(spec.n_positive));
  }
  rng.shuffle(positives);
  positives.resize(spec.n_positive);

  // Negatives: structurally similar phrasing about a different fact of the same course.
  std::vector<Candidate> negatives;
  for (const auto& course : training) {
    for (std::size_t k = 0; k < spec.concepts.size(); ++k) {
      for (std::size_t k2 = 0; k2 < spec.concepts.size(); ++k2) {
        if (k == k2) continue;
        for (const auto& q : spec.concepts[k].questions) {
          for (const auto& s : spec.concepts[k2].statements) {
            negatives.push_back({fill_template(q.text, course), fill_template(s.text, course),
                                 question_family(s)});
          }
        }
      }
    }
  }
  dedupe_preserving_order(negatives);
  if (negatives.size() < spec.n_negative) {
    throw CapacityError("template space supports " + std::to_string(negatives.size()) +
                        " negative pairs, spec asks for " + std::to_string(spec.n_negative));
  }
  rng.shuffle(negatives);
  negatives.resize(spec.n_negative);

  SynthCorpus out;
  for (auto& p : positives) {
    out.positives.push_back({p.a, p.b});
    out.positive_families.push_back(p.family);
  }
  for (auto& n : negatives) out.labeled.push_back({n.a, n.b, 0});
  if (spec.reuse_positives_as_labeled) {
    for (const auto& p : out.positives) out.labeled.push_back({p.anchor, p.positive, 1});
  }

  // Held-out split: one reserved zero-overlap combination per (course, topic), plus a
  // matched negative that asks about the next topic.
  for (std::size_t h = 0; h < heldout.size(); ++h) {
    const auto& course = heldout[h];
    const auto entities = course.entity_tokens();
    for (std::size_t k = 0; k < spec.concepts.size(); ++k) {
      const auto& topic = spec.concepts[k];
      const auto& combo = reserved[k][(h + k) % reserved[k].size()];
      SentencePair pair{fill_template(topic.questions[combo.question].text, course),
                        fill_template(topic.statements[combo.statement].text, course)};
      if (!non_entity_overlap(pair.anchor, pair.positive, entities).empty()) {
        throw std::logic_error("held-out pair shares non-entity tokens: " + pair.anchor + " | " +
                               pair.positive);
      }
      out.heldout_positives.push_back(pair);
      out.heldout_labeled.push_back({pair.anchor, pair.positive, 1});

      const auto& other = spec.concepts[(k + 1) % spec.concepts.size()];
      const auto& distractor = other.statements[(h + k) % other.statements.size()];
      out.heldout_labeled.push_back({pair.anchor, fill_template(distractor.text, course), 0});
    }
  }

  out.fixtures = make_fixtures(rng, fixture_courses);
  return out;
}

void write_synthetic(const std::filesystem::path& dir, const SynthCorpus& corpus) {
  std::filesystem::create_directories(dir / "docs");
  save_positive_pairs(dir / "pairs.jsonl", corpus.positives);
  save_labeled_pairs(dir / "labeled.jsonl", corpus.labeled);
  save_positive_pairs(dir / "heldout_pairs.jsonl", corpus.heldout_positives);
  save_labeled_pairs(dir / "heldout_labeled.jsonl", corpus.heldout_labeled);
  for (const auto& doc : corpus.fixtures.docs) {
    write_file_atomic(dir / "docs" / (doc.doc_id + ".txt"), doc.text);
  }
  save_gold(dir / "gold.json", corpus.fixtures.gold);
}

}  // namespace eduembed
