#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <sstream>

#include "posinduce/cli.hpp"
#include "posinduce/cluster.hpp"
#include "posinduce/evaluate.hpp"
#include "posinduce/induce.hpp"
#include "posinduce/reduce.hpp"
#include "posinduce/synthetic.hpp"

namespace py = pybind11;
using namespace posinduce;

namespace {

struct PyCorpus {
  Corpus corpus;
  EvalTagMap map;
};

PyCorpus load_corpus(const std::filesystem::path& path, const std::string& format,
                     std::optional<std::filesystem::path> tagmap, bool lowercase,
                     std::int64_t min_tag_count) {
  cli::InputOptions in;
  in.path = path;
  in.format = format;
  in.tagmap = std::move(tagmap);
  in.lowercase = lowercase;
  in.min_tag_count = min_tag_count;
  PyCorpus out{{}, cli::load_tagmap(in)};
  out.corpus = make_corpus(cli::read_input(in, out.map));
  return out;
}

PyCorpus corpus_from_tagged(const std::string& text, std::int64_t min_tag_count) {
  PyCorpus out{{}, EvalTagMap::default_map()};
  GoldOptions gold;
  gold.min_tag_count = min_tag_count;
  std::istringstream in(text);
  out.corpus = make_corpus(parse_gold(in, "<string>", out.map, gold));
  return out;
}

PyCorpus corpus_from_text(const std::string& text, bool lowercase) {
  TokenizerOptions options;
  options.lowercase = lowercase;
  return {make_corpus(tokenize_stream(text, options)), EvalTagMap::default_map()};
}

py::array_t<std::int32_t> cluster_array(const InducedTagging& tagging) {
  py::array_t<std::int32_t> out(static_cast<py::ssize_t>(tagging.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t p = 0; p < tagging.size(); ++p) {
    view(static_cast<py::ssize_t>(p)) = tagging[p].cluster;
  }
  return out;
}

std::vector<std::string> state_list(const InducedTagging& tagging) {
  std::vector<std::string> out;
  out.reserve(tagging.size());
  for (const auto& l : tagging.labels()) out.emplace_back(to_string(l.state));
  return out;
}

py::dict report_dict(const EvaluationReport& report) {
  py::list rows;
  for (const auto& r : report.rows) {
    py::dict row;
    row["tag"] = r.tag;
    row["frequency"] = r.frequency;
    row["classes"] = r.n_classes;
    row["correct"] = r.correct;
    row["incorrect"] = r.incorrect;
    row["precision"] = r.precision;
    row["recall"] = r.recall;
    row["f"] = r.f;
    rows.append(row);
  }
  py::dict out;
  out["rows"] = rows;
  out["precision"] = report.precision;
  out["recall"] = report.recall;
  out["f"] = report.f;
  out["fingerprint"] = report.fingerprint;
  out["seed"] = report.seed ? py::cast(*report.seed) : py::none();
  return out;
}

py::dict evaluate(const PyCorpus& c, const InducedTagging& tagging, bool count_unassigned) {
  const auto mapping = map_clusters_to_tags(tagging, c.corpus.tokens, c.map.tags().size());
  EvalOptions options;
  options.count_unassigned = count_unassigned;
  py::dict out = report_dict(score(tagging, c.corpus.tokens, mapping, c.map.tags(), options));
  out["accuracy"] = many_to_one_accuracy(tagging, c.corpus.tokens, mapping);
  return out;
}

// Re-encodes a corpus against a model's vocabulary when they differ.
Corpus encode_for(const InductionModel& model, const Corpus& corpus) {
  if (corpus.vocab == model.vocab) return corpus;
  TokenStream stream;
  for (std::int32_t w = 0; w < static_cast<std::int32_t>(corpus.vocab.size()); ++w) {
    stream.forms.push_back(corpus.vocab.word(w));
  }
  stream.tokens = corpus.tokens;
  stream.source_tags = corpus.source_tags;
  return encode_corpus(stream, model.vocab);
}

SparseCountMatrix to_counts(const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw UsageError("expected a 2-D count matrix");
  const auto view = a.unchecked<2>();
  std::vector<Triplet> triplets;
  for (py::ssize_t i = 0; i < view.shape(0); ++i) {
    for (py::ssize_t j = 0; j < view.shape(1); ++j) {
      if (view(i, j) != 0) {
        triplets.push_back({static_cast<std::int64_t>(i), static_cast<std::int32_t>(j), view(i, j)});
      }
    }
  }
  return SparseCountMatrix::from_triplets(view.shape(0), view.shape(1), triplets);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distributional part-of-speech induction";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("f_measure", &f_measure, py::arg("precision"), py::arg("recall"), py::arg("alpha") = 0.5);

  m.def(
      "generate_synthetic",
      [](std::size_t tokens, std::uint64_t seed, bool punctuation) {
        SyntheticOptions options;
        options.tokens = tokens;
        options.seed = seed;
        options.punctuation = punctuation;
        const auto s = generate_synthetic(options);
        py::dict out;
        out["tagged"] = s.tagged;
        out["ambiguous_forms"] = s.ambiguous_forms;
        out["types"] = s.types;
        out["tokens"] = s.tokens;
        return out;
      },
      py::arg("tokens") = SyntheticOptions{}.tokens, py::arg("seed") = 1,
      py::arg("punctuation") = true);

  py::class_<PyCorpus>(m, "Corpus")
      .def_static("load", &load_corpus, py::arg("path"), py::arg("format") = "auto",
                  py::arg("tagmap") = py::none(), py::arg("lowercase") = false,
                  py::arg("min_tag_count") = GoldOptions{}.min_tag_count)
      .def_static("from_tagged", &corpus_from_tagged, py::arg("text"),
                  py::arg("min_tag_count") = GoldOptions{}.min_tag_count)
      .def_static("from_text", &corpus_from_text, py::arg("text"), py::arg("lowercase") = false)
      .def("__len__", [](const PyCorpus& c) { return c.corpus.size(); })
      .def_property_readonly("words", [](const PyCorpus& c) {
        std::vector<std::string> out;
        for (const auto& t : c.corpus.tokens) {
          out.push_back(t.form_id >= 0 ? c.corpus.vocab.word(t.form_id) : std::string());
        }
        return out;
      })
      .def_property_readonly("vocabulary", [](const PyCorpus& c) {
        std::vector<std::pair<std::string, std::int64_t>> out;
        for (std::int32_t w = 0; w < static_cast<std::int32_t>(c.corpus.vocab.size()); ++w) {
          out.emplace_back(c.corpus.vocab.word(w), c.corpus.vocab.freq(w));
        }
        return out;
      })
      .def_property_readonly("tag_names", [](const PyCorpus& c) { return c.map.tags(); })
      .def_property_readonly("gold_tags", [](const PyCorpus& c) {
        std::vector<std::int32_t> out;
        for (const auto& t : c.corpus.tokens) out.push_back(t.gold_tag);
        return out;
      });

  py::class_<InductionConfig>(m, "Config")
      .def(py::init<>())
      .def_property(
          "experiment", [](const InductionConfig& c) { return std::string(to_string(c.experiment)); },
          [](InductionConfig& c, const std::string& v) { c.experiment = parse_experiment(v); })
      .def_readwrite("features", &InductionConfig::features)
      .def_readwrite("dims", &InductionConfig::dims)
      .def_readwrite("clusters", &InductionConfig::clusters)
      .def_readwrite("neighbor_classes", &InductionConfig::neighbor_classes)
      .def_readwrite("sample", &InductionConfig::sample)
      .def_readwrite("rare_threshold", &InductionConfig::rare_threshold)
      .def_readwrite("seed", &InductionConfig::seed)
      .def_readwrite("buckshot_sample", &InductionConfig::buckshot_sample)
      .def_readwrite("threads", &InductionConfig::threads)
      .def_property(
          "similarity", [](const InductionConfig& c) { return std::string(to_string(c.similarity)); },
          [](InductionConfig& c, const std::string& v) { c.similarity = parse_similarity(v); })
      .def("serialize", &InductionConfig::serialize)
      .def("fingerprint", &InductionConfig::fingerprint)
      .def("__repr__", [](const InductionConfig& c) { return "Config(" + c.fingerprint() + ")"; });

  py::class_<InducedTagging>(m, "Tagging")
      .def("__len__", &InducedTagging::size)
      .def_property_readonly("clusters", &cluster_array)
      .def_property_readonly("states", &state_list)
      .def("count", [](const InducedTagging& t, const std::string& state) {
        for (const auto s : {TokenState::Assigned, TokenState::Unassigned, TokenState::Skipped}) {
          if (to_string(s) == state) return t.count(s);
        }
        throw UsageError("unknown token state '" + state + "'");
      });

  py::class_<InductionModel>(m, "Model")
      .def_property_readonly("config", [](const InductionModel& mo) { return mo.config; })
      .def_property_readonly("tagging", [](const InductionModel& mo) { return mo.tagging; })
      .def_property_readonly("warnings", [](const InductionModel& mo) { return mo.warnings; })
      .def_property_readonly("singular_values",
                             [](const InductionModel& mo) { return mo.space.singular_values(); })
      .def("to_bytes", [](const InductionModel& mo) {
        std::ostringstream out;
        mo.write(out);
        return py::bytes(out.str());
      })
      .def("save", [](const InductionModel& mo, const std::filesystem::path& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError(path.string() + ": cannot open for writing");
        mo.write(out);
      })
      .def_static("load", [](const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError(path.string() + ": cannot open file");
        return InductionModel::read(in, path.string());
      })
      .def("tag", [](const InductionModel& mo, const PyCorpus& c) {
        const Corpus encoded = encode_for(mo, c.corpus);
        py::gil_scoped_release release;
        return tag_corpus(mo, encoded);
      })
      .def(
          "neighbors",
          [](const InductionModel& mo, const std::string& word, const std::string& side, std::size_t n) {
            const auto space = side_space(mo, parse_side(side));
            std::vector<std::pair<std::string, double>> out;
            for (const auto& nb : nearest_neighbors(mo.vocab, word, space, n)) {
              out.emplace_back(mo.vocab.word(nb.word), nb.similarity);
            }
            return out;
          },
          py::arg("word"), py::arg("side") = "left", py::arg("n") = 10);

  m.def(
      "induce",
      [](const PyCorpus& c, const InductionConfig& config) {
        py::gil_scoped_release release;
        return induce(c.corpus, config);
      },
      py::arg("corpus"), py::arg("config"));

  m.def("evaluate", &evaluate, py::arg("corpus"), py::arg("tagging"),
        py::arg("count_unassigned") = true);

  m.def(
      "svd",
      [](const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& counts, int dims,
         std::uint64_t seed) {
        SvdOptions options;
        options.seed = seed;
        const auto space = truncated_svd(to_counts(counts), dims, options);
        return py::make_tuple(space.singular_values(), space.basis(), space.row_embeddings());
      },
      py::arg("counts"), py::arg("dims"), py::arg("seed") = SvdOptions{}.seed,
      "Truncated SVD of a dense count matrix: (singular values, basis, row embeddings).");

  m.def(
      "buckshot",
      [](const RowMatrix& points, int clusters, std::uint64_t seed,
         std::optional<std::size_t> sample) {
        BuckshotOptions options;
        options.clusters = clusters;
        options.seed = seed;
        options.sample_size = sample;
        const auto model = buckshot(points, options);
        std::vector<std::int32_t> labels(static_cast<std::size_t>(points.rows()));
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
          labels[static_cast<std::size_t>(i)] =
              assign({points.row(i).data(), static_cast<std::size_t>(points.cols())}, model);
        }
        return py::make_tuple(model.centroids(), labels);
      },
      py::arg("points"), py::arg("clusters"), py::arg("seed") = 1, py::arg("sample") = py::none(),
      "Buckshot clustering: (centroids, nearest-centroid label per point).");
}
