#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "eduembed/cli.hpp"
#include "eduembed/errors.hpp"
#include "eduembed/evaluation.hpp"
#include "eduembed/losses.hpp"
#include "eduembed/persistence.hpp"
#include "eduembed/retrieval.hpp"
#include "eduembed/synthetic.hpp"

namespace py = pybind11;
using namespace eduembed;

namespace {

using Rows = std::vector<std::vector<double>>;

Matrix to_matrix(const Rows& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw DimensionError("ragged matrix rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

Rows to_rows(const Matrix& m) {
  Rows out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i].assign(m.row(i).begin(), m.row(i).end());
  return out;
}

py::tuple loss_tuple(const PairLossResult& r) {
  return py::make_tuple(r.loss, to_rows(r.grad_left), to_rows(r.grad_right));
}

py::dict chunk_dict(const Chunk& c) {
  py::dict d;
  d["doc_id"] = c.doc_id;
  d["chunk_index"] = c.chunk_index;
  d["text"] = c.text;
  return d;
}

}  // namespace

PYBIND11_MODULE(_eduembed, m) {
  m.doc() = "Bindings for the eduembed core library";

  py::register_exception<Error>(m, "EduembedError");

  m.def("tokenize", [](const std::string& text) { return tokenize(text); });

  py::class_<Vocabulary>(m, "Vocabulary")
      .def_property_readonly("tokens", &Vocabulary::tokens)
      .def_property_readonly("hash_buckets", &Vocabulary::hash_buckets)
      .def_property_readonly("known_size", &Vocabulary::known_size)
      .def_property_readonly("total_size", &Vocabulary::total_size)
      .def("token_id", [](const Vocabulary& v, const std::string& t) { return v.token_id(t); })
      .def("__eq__", [](const Vocabulary& a, const Vocabulary& b) { return a == b; });

  m.def("build_vocab", &build_vocab, py::arg("corpus"), py::arg("min_count") = 1,
        py::arg("hash_buckets") = kDefaultHashBuckets);
  m.def("save_vocabulary", &save_vocabulary);
  m.def("load_vocabulary", &load_vocabulary);

  py::class_<Encoder>(m, "Encoder")
      .def_property_readonly("vocab", [](const Encoder& e) { return e.vocab; })
      .def_property_readonly("fingerprint", [](const Encoder& e) { return fingerprint_hex(e.fingerprint); })
      .def_property_readonly("dim", [](const Encoder& e) { return e.params.d_out(); })
      .def("encode", [](const Encoder& e, const std::string& text) { return e.encode(text).values(); });

  m.def("init_encoder", [](const Vocabulary& vocab, std::size_t d_emb, std::size_t d_out, std::uint64_t seed) {
    return make_encoder(vocab, init_params(vocab.total_size(), d_emb, d_out, seed));
  }, py::arg("vocab"), py::arg("d_emb") = 64, py::arg("d_out") = 64, py::arg("seed") = 42);
  m.def("load_checkpoint", [](const std::filesystem::path& dir) { return load_checkpoint(dir).encoder(); });
  m.def("save_checkpoint", [](const std::filesystem::path& dir, const Encoder& e) {
    save_checkpoint(dir, e.vocab, e.params);
  });

  m.def("mnrl_loss", [](const Rows& a, const Rows& p, double scale) {
    return loss_tuple(mnrl_loss(to_matrix(a), to_matrix(p), LossConfig{scale}));
  }, py::arg("anchors"), py::arg("positives"), py::arg("scale") = kDefaultLossScale);
  m.def("cosine_mse_loss", [](const Rows& l, const Rows& r, const std::vector<int>& labels) {
    return loss_tuple(cosine_mse_loss(to_matrix(l), to_matrix(r), labels));
  });

  m.def("chunk_document", [](const std::string& doc_id, const std::string& text, std::size_t max_words) {
    py::list out;
    for (const auto& c : chunk_document(doc_id, text, max_words)) out.append(chunk_dict(c));
    return out;
  }, py::arg("doc_id"), py::arg("text"), py::arg("max_words") = kDefaultMaxWords);

  m.def("retrieve", [](const Encoder& e, const std::vector<std::pair<std::string, std::string>>& docs,
                       const std::string& question, std::size_t k) {
    std::vector<Document> d;
    for (const auto& [id, text] : docs) d.push_back({id, text});
    const auto index = build_index(d, e);
    py::list out;
    for (const auto& h : top_k(index, e, question, k)) {
      auto item = chunk_dict(h.chunk);
      item["score"] = h.score;
      item["rank"] = h.rank;
      out.append(item);
    }
    return out;
  }, py::arg("encoder"), py::arg("docs"), py::arg("question"), py::arg("k") = 3);

  m.def("normalize_text", &normalize_text);
  m.def("grade_answer", [](const std::string& answer, const GoldField& gold) {
    return to_string(grade_answer(answer, gold));
  });
  m.def("extractive_answer", [](const std::string& context, const std::string& question) {
    return ExtractiveBackend{}.answer(context, question);
  });

  m.def("generate_synthetic", [](std::uint64_t seed, std::size_t n_positive, std::size_t n_negative) {
    const auto c = generate_synthetic(SynthSpec::defaults(seed, n_positive, n_negative));
    py::list pos, lab;
    for (const auto& p : c.positives) pos.append(py::make_tuple(p.anchor, p.positive));
    for (const auto& p : c.labeled) lab.append(py::make_tuple(p.sentence1, p.sentence2, p.label));
    py::dict out;
    out["positives"] = pos;
    out["labeled"] = lab;
    return out;
  }, py::arg("seed") = 42, py::arg("n_positive") = 256, py::arg("n_negative") = 64);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int rc;
    {
      py::gil_scoped_release release;
      rc = run_cli(args, out, err);
    }
    return py::make_tuple(rc, out.str(), err.str());
  });
}
