#include "eduembed/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>

#include "eduembed/errors.hpp"
#include "eduembed/evaluation.hpp"
#include "eduembed/persistence.hpp"
#include "eduembed/retrieval.hpp"
#include "eduembed/synthetic.hpp"
#include "eduembed/trainer.hpp"

namespace eduembed {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return 1;
    case ErrorKind::data: return 2;
    case ErrorKind::numeric: return 3;
    case ErrorKind::network: return 4;
  }
  return 3;
}

struct GenArgs {
  std::uint64_t seed = 42;
  std::string out;
  std::size_t n_positive = 256;
  std::size_t n_negative = 64;
};

struct VocabArgs {
  std::string pairs;
  std::size_t min_count = 1;
  std::size_t hash_buckets = kDefaultHashBuckets;
  std::string out;
};

struct TrainArgs {
  std::string mode = "mnrl";
  std::string pairs;
  std::string labeled;
  std::string vocab;
  std::string out;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch;
  std::optional<double> lr;
  std::optional<double> warmup;
  std::optional<double> weight_decay;
  std::optional<double> scale;
  std::optional<std::uint64_t> seed;
  std::size_t d_emb = kDefaultEmbeddingDim;
  std::size_t d_out = kDefaultEmbeddingDim;
  std::string history;
};

struct IndexArgs {
  std::string ckpt;
  std::string docs;
  std::string out;
  std::size_t max_words = kDefaultMaxWords;
};

struct QueryArgs {
  std::string ckpt;
  std::string index;
  std::string question;
  std::size_t k = 3;
  std::string doc;
};

struct EvalArgs {
  std::string ckpt;
  std::string docs;
  std::string gold;
  std::string questions;
  std::string backend = "extractive";
  std::string endpoint;
  std::string model = "gpt-4o-mini";
  double timeout = 30.0;
  std::size_t k = 3;
  std::size_t max_words = kDefaultMaxWords;
  std::size_t concurrency = 1;
  std::string label;
  std::string report;
};

void cmd_gen(const GenArgs& a, std::ostream& out) {
  const auto corpus = generate_synthetic(SynthSpec::defaults(a.seed, a.n_positive, a.n_negative));
  write_synthetic(a.out, corpus);
  out << json{{"positives", corpus.positives.size()},
              {"labeled", corpus.labeled.size()},
              {"heldout_positives", corpus.heldout_positives.size()},
              {"docs", corpus.fixtures.docs.size()}}
             .dump()
      << '\n';
}

void cmd_vocab(const VocabArgs& a, std::ostream& out) {
  std::vector<std::string> corpus;
  for (const auto& p : load_positive_pairs(a.pairs)) {
    corpus.push_back(p.anchor);
    corpus.push_back(p.positive);
  }
  const auto vocab = build_vocab(corpus, a.min_count, a.hash_buckets);
  save_vocabulary(a.out, vocab);
  out << json{{"known_size", vocab.known_size()}, {"hash_buckets", vocab.hash_buckets()}}.dump()
      << '\n';
}

void cmd_train(const TrainArgs& a, std::ostream& out) {
  const TrainMode mode = parse_train_mode(a.mode);
  if (mode == TrainMode::dual && a.labeled.empty()) {
    throw ConfigError("train --mode dual requires --labeled FILE");
  }
  TrainConfig cfg = TrainConfig::defaults_for(mode);
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.batch) cfg.batch_size = *a.batch;
  if (a.lr) cfg.peak_lr = *a.lr;
  if (a.warmup) cfg.warmup_fraction = *a.warmup;
  if (a.weight_decay) cfg.weight_decay = *a.weight_decay;
  if (a.scale) cfg.loss_scale = *a.scale;
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();

  const auto vocab = load_vocabulary(a.vocab);
  const auto positives = load_positive_pairs(a.pairs);
  std::optional<std::vector<LabeledPair>> labeled;
  if (mode == TrainMode::dual) labeled = load_labeled_pairs(a.labeled);

  auto params = init_params(vocab.total_size(), a.d_emb, a.d_out, cfg.seed);
  const auto result = train(std::move(params), vocab, positives, labeled, cfg);
  save_checkpoint(a.out, vocab, result.params, cfg.to_json());
  if (!a.history.empty()) write_file_atomic(a.history, history_jsonl(result.history));

  json summary{{"steps", result.history.size()},
               {"fingerprint", fingerprint_hex(weights_fingerprint(result.params))}};
  const auto mnrl = epoch_mean_losses(result.history, LossKind::mnrl);
  if (!mnrl.empty()) {
    summary["mnrl_first_epoch"] = mnrl.front();
    summary["mnrl_last_epoch"] = mnrl.back();
  }
  const auto cosine = epoch_mean_losses(result.history, LossKind::cosine);
  if (!cosine.empty()) {
    summary["cosine_first_epoch"] = cosine.front();
    summary["cosine_last_epoch"] = cosine.back();
  }
  out << summary.dump() << '\n';
}

void cmd_index(const IndexArgs& a, std::ostream& out) {
  const auto encoder = load_checkpoint(a.ckpt).encoder();
  const auto index = build_index(load_documents(a.docs), encoder, a.max_words);
  save_index(a.out, index);
  out << json{{"chunks", index.entries.size()}, {"skipped", index.skipped_chunks}}.dump() << '\n';
}

void cmd_query(const QueryArgs& a, std::ostream& out) {
  const auto encoder = load_checkpoint(a.ckpt).encoder();
  const auto index = load_index(a.index);
  std::optional<std::string> filter;
  if (!a.doc.empty()) filter = a.doc;
  json hits = json::array();
  for (const auto& h : top_k(index, encoder, a.question, a.k, filter)) {
    hits.push_back({{"rank", h.rank},
                    {"doc_id", h.chunk.doc_id},
                    {"chunk_index", h.chunk.chunk_index},
                    {"score", h.score},
                    {"text", h.chunk.text}});
  }
  out << json{{"question", a.question}, {"hits", hits}}.dump(2) << '\n';
}

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  std::unique_ptr<AnswerBackend> backend;
  if (a.backend == "extractive") {
    backend = std::make_unique<ExtractiveBackend>();
  } else if (a.backend == "remote") {
    if (a.endpoint.empty()) throw ConfigError("eval --backend remote requires --endpoint URL");
    RemoteConfig rc;
    rc.endpoint = a.endpoint;
    rc.model = a.model;
    rc.timeout_seconds = a.timeout;
    backend = std::make_unique<RemoteBackend>(rc);
  } else {
    throw ConfigError("unknown backend '" + a.backend + "'");
  }

  const auto ckpt = load_checkpoint(a.ckpt);
  const auto encoder = ckpt.encoder();
  const auto index = build_index(load_documents(a.docs), encoder, a.max_words);
  const auto questions = a.questions.empty() ? QuestionSet::defaults() : load_questions(a.questions);
  const auto gold = load_gold(a.gold);

  BenchmarkOptions options;
  options.k = a.k;
  options.concurrency = a.concurrency;
  if (!a.label.empty()) options.model_label = a.label;
  else if (ckpt.training.contains("mode")) options.model_label = ckpt.training["mode"].get<std::string>();

  const auto report = run_benchmark(index, encoder, questions, gold, *backend, options);
  const auto summary = report.summary_json();
  write_file_atomic(a.report, summary.dump(2) + "\n");
  write_file_atomic(a.report + ".trace.jsonl", report.traces_jsonl());
  out << summary.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Train and evaluate desk-scale sentence-embedding retrievers"};
  app.name("eduembed");
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic pair corpus, fixture docs and gold facts");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--n-positive", gen.n_positive, "Positive pairs")->capture_default_str();
  gen_cmd->add_option("--n-negative", gen.n_negative, "Label-0 pairs")->capture_default_str();

  VocabArgs voc;
  auto* voc_cmd = app.add_subcommand("build-vocab", "Build a vocabulary from a positive-pairs file");
  voc_cmd->add_option("--pairs", voc.pairs, "Positive pairs JSONL")->required();
  voc_cmd->add_option("--min-count", voc.min_count, "Minimum token count")->capture_default_str();
  voc_cmd->add_option("--hash-buckets", voc.hash_buckets, "Buckets for unseen tokens")->capture_default_str();
  voc_cmd->add_option("--out", voc.out, "Output directory")->required();

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train an encoder and write a checkpoint");
  tr_cmd->add_option("--mode", tr.mode, "mnrl or dual")->check(CLI::IsMember({"mnrl", "dual"}))->capture_default_str();
  tr_cmd->add_option("--pairs", tr.pairs, "Positive pairs JSONL")->required();
  tr_cmd->add_option("--labeled", tr.labeled, "Labeled pairs JSONL (dual mode)");
  tr_cmd->add_option("--vocab", tr.vocab, "Vocabulary directory")->required();
  tr_cmd->add_option("--out", tr.out, "Checkpoint directory")->required();
  tr_cmd->add_option("--epochs", tr.epochs, "Epochs (default 25)");
  tr_cmd->add_option("--batch", tr.batch, "Batch size (default 64)");
  tr_cmd->add_option("--lr", tr.lr, "Peak learning rate (default 2e-5 mnrl, 1e-5 dual)");
  tr_cmd->add_option("--warmup", tr.warmup, "Warmup fraction (default 0.15 mnrl, 0.10 dual)");
  tr_cmd->add_option("--weight-decay", tr.weight_decay, "AdamW weight decay (default 0.01)");
  tr_cmd->add_option("--scale", tr.scale, "MNRL scale (default 20)");
  tr_cmd->add_option("--seed", tr.seed, "Seed for init and shuffling (default 42)");
  tr_cmd->add_option("--d-emb", tr.d_emb, "Embedding width")->capture_default_str();
  tr_cmd->add_option("--d-out", tr.d_out, "Output width")->capture_default_str();
  tr_cmd->add_option("--history", tr.history, "Write per-step losses as JSONL");

  IndexArgs ix;
  auto* ix_cmd = app.add_subcommand("index", "Chunk and embed a document directory");
  ix_cmd->add_option("--ckpt", ix.ckpt, "Checkpoint directory")->required();
  ix_cmd->add_option("--docs", ix.docs, "Directory of .txt documents")->required();
  ix_cmd->add_option("--out", ix.out, "Index file")->required();
  ix_cmd->add_option("--max-words", ix.max_words, "Words per chunk")->capture_default_str();

  QueryArgs q;
  auto* q_cmd = app.add_subcommand("query", "Print the top-k chunks for a question as JSON");
  q_cmd->add_option("--ckpt", q.ckpt, "Checkpoint directory")->required();
  q_cmd->add_option("--index", q.index, "Index file")->required();
  q_cmd->add_option("--question", q.question, "Question text")->required();
  q_cmd->add_option("--k", q.k, "Hits to return")->capture_default_str();
  q_cmd->add_option("--doc", q.doc, "Restrict to one doc_id");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Run the per-category QA benchmark");
  ev_cmd->add_option("--ckpt", ev.ckpt, "Checkpoint directory")->required();
  ev_cmd->add_option("--docs", ev.docs, "Directory of .txt documents")->required();
  ev_cmd->add_option("--gold", ev.gold, "Gold facts JSON")->required();
  ev_cmd->add_option("--questions", ev.questions, "Questions JSONL (default: built-in set)");
  ev_cmd->add_option("--backend", ev.backend, "extractive or remote")
      ->check(CLI::IsMember({"extractive", "remote"}))
      ->capture_default_str();
  ev_cmd->add_option("--endpoint", ev.endpoint, "Chat-completions URL (remote backend)");
  ev_cmd->add_option("--model", ev.model, "Remote model name")->capture_default_str();
  ev_cmd->add_option("--timeout", ev.timeout, "Remote timeout in seconds")->capture_default_str();
  ev_cmd->add_option("--k", ev.k, "Chunks retrieved per question")->capture_default_str();
  ev_cmd->add_option("--max-words", ev.max_words, "Words per chunk")->capture_default_str();
  ev_cmd->add_option("--concurrency", ev.concurrency, "Parallel cells")->capture_default_str();
  ev_cmd->add_option("--label", ev.label, "Model label in the report (default: training mode)");
  ev_cmd->add_option("--report", ev.report, "Summary JSON; traces go to <report>.trace.jsonl")->required();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("eduembed");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen_cmd) cmd_gen(gen, out);
    else if (*voc_cmd) cmd_vocab(voc, out);
    else if (*tr_cmd) cmd_train(tr, out);
    else if (*ix_cmd) cmd_index(ix, out);
    else if (*q_cmd) cmd_query(q, out);
    else if (*ev_cmd) cmd_eval(ev, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace eduembed
