// Acceptance checks: one PASS / FAIL / SKIPPED line per criterion.
//
//   acceptance [--expect-fail N[,N...]] [--only N[,N...]]
//
// Exits 0 when every failing criterion is listed in --expect-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "posinduce/cluster.hpp"
#include "posinduce/context.hpp"
#include "posinduce/evaluate.hpp"
#include "posinduce/induce.hpp"
#include "posinduce/reduce.hpp"
#include "posinduce/synthetic.hpp"

using namespace posinduce;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

enum class Outcome { Pass, Fail, Skipped };

struct Verdict {
  Outcome outcome;
  std::string detail;
};

Verdict pass_if(bool ok, std::string detail) {
  return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)};
}

std::string fmt(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// 1 -------------------------------------------------------------------------

Verdict table_reproduction() {
  const auto t0 = Clock::now();
  int rows = 0, bad = 0;
  std::string first_bad;
  for (const char* name : {"brown_type.tsv", "brown_token.tsv", "brown_generalized.tsv",
                           "brown_natural.tsv"}) {
    const std::string path = std::string(POSINDUCE_TEST_DATA) + "/" + name;
    std::ifstream in(path);
    if (!in) return {Outcome::Fail, "missing fixture " + path};
    const EvaluationReport printed = parse_report(in, path);
    const EvaluationReport computed = rescore(printed);
    const auto check = [&](const std::string& label, double want, double got) {
      if (std::abs(want - got) > 0.005 + 1e-12) {
        ++bad;
        if (first_bad.empty()) {
          first_bad = std::string(name) + " " + label + " printed " + fmt(want, 2) + " got " + fmt(got, 4);
        }
      }
    };
    for (std::size_t i = 0; i < printed.rows.size(); ++i) {
      const auto& p = printed.rows[i];
      const auto& c = computed.rows[i];
      check(p.tag + " P", p.precision, c.precision);
      check(p.tag + " R", p.recall, c.recall);
      check(p.tag + " F", p.f, c.f);
      ++rows;
    }
    check("avg P", printed.precision, computed.precision);
    check("avg R", printed.recall, computed.recall);
    check("avg F", printed.f, computed.f);
  }
  const double secs = seconds_since(t0);
  std::string detail = std::to_string(rows) + " rows, " + std::to_string(bad) +
                       " outside 0.005, " + fmt(secs, 4) + " s";
  if (!first_bad.empty()) detail += "; first: " + first_bad;
  return pass_if(bad == 0 && rows > 0 && secs < 1.0, detail);
}

// 2 -------------------------------------------------------------------------

Verdict svd_oracle() {
  Rng rng(20240501);
  double worst_sigma = 0.0, worst_ortho = 0.0;
  int monotone_violations = 0, matrices = 0;
  while (matrices < 200) {
    const int rows = 1 + static_cast<int>(rng.uniform_index(8));
    const int cols = 1 + static_cast<int>(rng.uniform_index(8));
    std::vector<std::vector<std::int64_t>> dense(static_cast<std::size_t>(rows),
                                                 std::vector<std::int64_t>(static_cast<std::size_t>(cols)));
    for (auto& r : dense) {
      for (auto& x : r) x = static_cast<std::int64_t>(rng.uniform_index(10));
    }
    const auto m = SparseCountMatrix::from_dense(dense);
    if (m.nnz() == 0) continue;
    ++matrices;
    const Eigen::MatrixXd c = m.to_dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.transpose() * c);
    const Eigen::VectorXd ev = eig.eigenvalues().reverse();
    double last_error = std::numeric_limits<double>::infinity();
    for (int dims = 1; dims <= std::min(rows, cols); ++dims) {
      const auto space = truncated_svd(m, dims);
      for (int i = 0; i < space.dims(); ++i) {
        const double oracle = std::sqrt(std::max(0.0, ev[i]));
        worst_sigma = std::max(worst_sigma, std::abs(space.singular_values()[i] - oracle));
      }
      // Dropped dimensions must be numerically zero in the oracle.
      for (int i = space.dims(); i < dims; ++i) {
        worst_sigma = std::max(worst_sigma, std::sqrt(std::max(0.0, ev[i])));
      }
      const Eigen::MatrixXd d = space.basis();
      const Eigen::MatrixXd gram = d.transpose() * d;
      worst_ortho = std::max(
          worst_ortho,
          (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff());
      const double error = (c - c * d * d.transpose()).norm();
      if (error > last_error + 1e-9) ++monotone_violations;
      last_error = error;
    }
  }
  return pass_if(worst_sigma <= 1e-9 && worst_ortho < 1e-8 && monotone_violations == 0,
                 std::to_string(matrices) + " matrices, max |sigma - oracle| " +
                     fmt(worst_sigma * 1e12, 3) + "e-12, orthonormality " +
                     fmt(worst_ortho * 1e12, 3) + "e-12, " + std::to_string(monotone_violations) +
                     " reconstruction increases");
}

// 3 -------------------------------------------------------------------------

// Group-average agglomeration recomputed from scratch at every step.
std::vector<std::pair<int, int>> exhaustive_merges(const RowMatrix& points, int k) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto row = [&](std::size_t i) {
    return std::span<const double>(points.row(static_cast<Eigen::Index>(i)).data(),
                                   static_cast<std::size_t>(points.cols()));
  };
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  std::vector<std::pair<int, int>> merges;
  for (std::size_t active = n; active > static_cast<std::size_t>(k); --active) {
    double best = -3.0;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!alive[b]) continue;
        double sum = 0.0;
        for (auto x : members[a]) {
          for (auto y : members[b]) sum += cosine(row(x), row(y));
        }
        const double avg = sum / static_cast<double>(members[a].size() * members[b].size());
        if (avg > best + 1e-12) {
          best = avg;
          ba = a;
          bb = b;
        }
      }
    }
    merges.emplace_back(static_cast<int>(ba), static_cast<int>(bb));
    members[ba].insert(members[ba].end(), members[bb].begin(), members[bb].end());
    alive[bb] = false;
  }
  return merges;
}

Verdict clustering_oracle() {
  Rng rng(77);
  int runs = 0, mismatched = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(9));
    const int dims = 2 + static_cast<int>(rng.uniform_index(4));
    RowMatrix points(n, dims);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < dims; ++j) points(i, j) = rng.normal();
    }
    const int k = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    BuckshotOptions options;
    options.clusters = k;
    options.sample_size = static_cast<std::size_t>(n);
    options.seed = static_cast<std::uint64_t>(trial);
    const auto model = buckshot(points, options);
    std::vector<std::pair<int, int>> got;
    for (const auto& m : model.merges) got.emplace_back(m.into, m.from);
    ++runs;
    if (got != exhaustive_merges(points, k)) ++mismatched;
  }

  int recovered = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng blob_rng(1000 + seed);
    const int n = 200, dims = 5;
    const double spread = 1.0, separation = 10.0 * spread;
    RowMatrix points(n, dims);
    std::vector<int> truth(n);
    for (int i = 0; i < n; ++i) {
      truth[static_cast<std::size_t>(i)] = static_cast<int>(blob_rng.uniform_index(2));
      for (int j = 0; j < dims; ++j) points(i, j) = spread * blob_rng.normal();
      // Centers on orthogonal axes, each `separation` from the origin.
      points(i, truth[static_cast<std::size_t>(i)]) += separation;
    }
    BuckshotOptions options;
    options.clusters = 2;
    options.seed = seed;
    const auto model = buckshot(points, options);
    bool exact = true;
    std::vector<int> label_of_truth(2, -1);
    for (int i = 0; i < n && exact; ++i) {
      const auto c = assign({points.row(i).data(), static_cast<std::size_t>(dims)}, model);
      int& expected = label_of_truth[static_cast<std::size_t>(truth[static_cast<std::size_t>(i)])];
      if (expected < 0) expected = c;
      exact = c == expected;
    }
    exact = exact && label_of_truth[0] != label_of_truth[1];
    if (exact) ++recovered;
  }
  return pass_if(mismatched == 0 && recovered == 20,
                 std::to_string(runs - mismatched) + "/" + std::to_string(runs) +
                     " merge sequences match, blobs recovered " + std::to_string(recovered) + "/20");
}

// 4 -------------------------------------------------------------------------

Corpus random_toy_corpus(Rng& rng) {
  const int vocab = 3 + static_cast<int>(rng.uniform_index(10));
  const int length = 5 + static_cast<int>(rng.uniform_index(150));
  std::string text;
  for (int i = 0; i < length; ++i) {
    // Skewed draw so frequencies differ.
    const double u = rng.uniform01();
    const int w = static_cast<int>(u * u * vocab);
    text += "w" + std::to_string(w);
    const double r = rng.uniform01();
    text += r < 0.05 ? "\n\n" : " ";
  }
  return make_corpus(tokenize_stream(text));
}

Verdict context_conservation() {
  Rng rng(4242);
  int mass_mismatch = 0, rowsum_mismatch = 0, corpora = 0, generalized = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Corpus c = random_toy_corpus(rng);
    ++corpora;
    const std::size_t f = 1 + rng.uniform_index(c.vocab.size());
    const auto features = ContextFeatureSet::top_words(c.vocab, f);
    std::set<std::int32_t> feature_words(features.feature_ids.begin(), features.feature_ids.end());
    std::int64_t left_scan = 0, right_scan = 0;
    for (std::size_t p = 0; p + 1 < c.size(); ++p) {
      if (c.tokens[p + 1].boundary_before) continue;
      // Bigram (p, p+1): p is the left neighbor of p+1 and vice versa.
      if (feature_words.count(c.tokens[p].form_id)) ++left_scan;
      if (feature_words.count(c.tokens[p + 1].form_id)) ++right_scan;
    }
    const auto left = count_context_vectors(c, features, Side::Left);
    const auto right = count_context_vectors(c, features, Side::Right);
    if (left.total() != left_scan || right.total() != right_scan) ++mass_mismatch;

    NeighborClassOptions options;
    options.dims = 3;
    options.classes = static_cast<int>(std::min<std::size_t>(3, c.vocab.size()));
    options.seed = static_cast<std::uint64_t>(trial);
    for (const auto& [source, target] :
         {std::pair{&left, Side::Right}, std::pair{&right, Side::Left}}) {
      if (source->nnz() == 0) continue;
      NeighborClassModel classes;
      try {
        classes = build_neighbor_classes(*source, options);
      } catch (const NumericError&) {
        continue;  // degenerate toy matrix; nothing to conserve
      }
      const auto g = generalized_context_vectors(c, classes, target);
      ++generalized;
      for (std::int32_t w = 0; w < static_cast<std::int32_t>(c.vocab.size()); ++w) {
        std::int64_t neighbors = 0;
        for (std::size_t p = 0; p < c.size(); ++p) {
          if (c.tokens[p].form_id != w) continue;
          if (target == Side::Left ? c.has_left(p) : c.has_right(p)) ++neighbors;
        }
        if (g.row_sum(w) != neighbors) ++rowsum_mismatch;
      }
    }
  }
  return pass_if(mass_mismatch == 0 && rowsum_mismatch == 0 && generalized >= 50,
                 std::to_string(corpora) + " corpora, " + std::to_string(mass_mismatch) +
                     " mass mismatches, " + std::to_string(generalized) +
                     " generalized matrices with " + std::to_string(rowsum_mismatch) +
                     " row-sum mismatches");
}

// 5, 6 ----------------------------------------------------------------------

struct Experiment5Data {
  SyntheticCorpus synthetic;
  EvalTagMap map = EvalTagMap::default_map();
  Corpus corpus;
  std::vector<bool> ambiguous;
};

Experiment5Data synthetic_data(bool punctuation) {
  Experiment5Data d;
  SyntheticOptions options;
  options.tokens = 120000;
  options.seed = 1;
  options.punctuation = punctuation;
  d.synthetic = generate_synthetic(options);
  std::istringstream in(d.synthetic.tagged);
  d.corpus = make_corpus(parse_gold(in, "synthetic", d.map));
  const std::set<std::string> forms(d.synthetic.ambiguous_forms.begin(),
                                    d.synthetic.ambiguous_forms.end());
  d.ambiguous.resize(d.corpus.size());
  for (std::size_t p = 0; p < d.corpus.size(); ++p) {
    const auto w = d.corpus.tokens[p].form_id;
    d.ambiguous[p] = w >= 0 && forms.count(d.corpus.vocab.word(w)) > 0;
  }
  return d;
}

InductionConfig desk_config(Experiment experiment) {
  InductionConfig c;
  c.experiment = experiment;
  c.features = 100;
  c.dims = 25;
  c.clusters = 30;
  return c;
}

struct Run {
  EvaluationReport report;
  double ambiguous_accuracy = 0.0;
  InductionModel model;
};

Run run_experiment(const Corpus& corpus, const EvalTagMap& map, const InductionConfig& config,
                   const std::vector<bool>* mask) {
  Run r;
  r.model = induce(corpus, config);
  const auto mapping = map_clusters_to_tags(r.model.tagging, corpus.tokens, map.tags().size());
  r.report = score(r.model.tagging, corpus.tokens, mapping, map.tags());
  if (mask) r.ambiguous_accuracy = many_to_one_accuracy(r.model.tagging, corpus.tokens, mapping, mask);
  return r;
}

Verdict token_beats_type() {
  const auto t0 = Clock::now();
  const auto d = synthetic_data(false);
  std::set<TagId> classes;
  for (const auto& t : d.corpus.tokens) {
    if (t.gold_tag >= 0) classes.insert(t.gold_tag);
  }
  const double ambiguous_share =
      static_cast<double>(d.synthetic.ambiguous_forms.size()) / static_cast<double>(d.synthetic.types);
  const auto type = run_experiment(d.corpus, d.map, desk_config(Experiment::Type), &d.ambiguous);
  const auto token = run_experiment(d.corpus, d.map, desk_config(Experiment::Token), &d.ambiguous);
  const double secs = seconds_since(t0);
  const bool corpus_ok = d.synthetic.tokens >= 100000 && classes.size() >= 12 && ambiguous_share >= 0.10;
  const bool ok = corpus_ok && token.report.f >= type.report.f + 0.10 &&
                  token.ambiguous_accuracy >= type.ambiguous_accuracy + 0.15 && secs < 600.0;
  return pass_if(ok, std::to_string(d.synthetic.tokens) + " tokens, " + std::to_string(classes.size()) +
                         " classes, " + fmt(100 * ambiguous_share, 1) + "% ambiguous types; macro-F TYPE " +
                         fmt(type.report.f) + " TOKEN " + fmt(token.report.f) + " (need +0.10); ambiguous-token accuracy TYPE " +
                         fmt(type.ambiguous_accuracy) + " TOKEN " + fmt(token.ambiguous_accuracy) +
                         " (need +0.15); " + fmt(secs, 1) + " s");
}

Verdict natural_contexts() {
  const auto d = synthetic_data(true);
  const auto token = run_experiment(d.corpus, d.map, desk_config(Experiment::Token), nullptr);
  const auto natural_config = desk_config(Experiment::Natural);
  const auto natural = run_experiment(d.corpus, d.map, natural_config, nullptr);
  const auto frequent_word = [&](std::size_t p) {
    const Token& t = d.corpus.tokens[p];
    return !t.is_punct && t.form_id >= 0 &&
           d.corpus.vocab.freq(t.form_id) >= natural_config.rare_threshold;
  };
  std::size_t skipped = 0, violations = 0;
  for (std::size_t p = 0; p < d.corpus.size(); ++p) {
    if (natural.model.tagging[p].state != TokenState::Skipped) continue;
    ++skipped;
    const bool left = d.corpus.has_left(p) && frequent_word(p - 1);
    const bool right = d.corpus.has_right(p) && frequent_word(p + 1);
    if (left && right) ++violations;
  }
  return pass_if(natural.report.f >= token.report.f && violations == 0 && skipped > 0,
                 "macro-F TOKEN " + fmt(token.report.f) + " NATURAL " + fmt(natural.report.f) + "; " +
                     std::to_string(skipped) + " skipped, " + std::to_string(violations) +
                     " between two frequent words");
}

// 7 -------------------------------------------------------------------------

Verdict brown_corpus() {
  const char* path = std::getenv("POSINDUCE_BROWN_CORPUS");
  if (!path || !*path) return {Outcome::Skipped, "POSINDUCE_BROWN_CORPUS not set"};
  if (!std::filesystem::exists(path)) return {Outcome::Skipped, std::string(path) + " does not exist"};
  const auto map = EvalTagMap::default_map();
  const Corpus corpus = make_corpus(load_gold(path, map));
  InductionConfig config;
  config.experiment = Experiment::Type;
  const auto type = run_experiment(corpus, map, config, nullptr);
  config.experiment = Experiment::Token;
  const auto token = run_experiment(corpus, map, config, nullptr);
  return pass_if(token.report.f >= 0.60 && token.report.f >= type.report.f + 0.15,
                 std::to_string(corpus.size()) + " tokens; macro-F TYPE " + fmt(type.report.f) +
                     " TOKEN " + fmt(token.report.f));
}

// 8 -------------------------------------------------------------------------

Verdict determinism() {
  SyntheticOptions options;
  options.tokens = 15000;
  options.seed = 9;
  const auto synthetic = generate_synthetic(options);
  const auto map = EvalTagMap::default_map();
  std::istringstream in(synthetic.tagged);
  const Corpus corpus = make_corpus(parse_gold(in, "synthetic", map));
  int differing = 0, experiments = 0;
  for (const auto experiment :
       {Experiment::Type, Experiment::Token, Experiment::Natural, Experiment::Generalized}) {
    std::string bundles[2], reports[2];
    for (int run = 0; run < 2; ++run) {
      InductionConfig config = desk_config(experiment);
      config.neighbor_classes = 40;
      config.sample = 5000;
      config.seed = 11;
      config.threads = run == 0 ? 0 : 1;
      const InductionModel model = induce(corpus, config);
      std::ostringstream b;
      model.write(b);
      bundles[run] = b.str();
      const auto mapping = map_clusters_to_tags(model.tagging, corpus.tokens, map.tags().size());
      auto report = score(model.tagging, corpus.tokens, mapping, map.tags());
      report.fingerprint = config.fingerprint();
      report.seed = config.seed;
      std::ostringstream r;
      render_report(report, ReportFormat::Delimited, r);
      render_report(report, ReportFormat::Text, r);
      reports[run] = r.str();
    }
    ++experiments;
    if (bundles[0] != bundles[1] || reports[0] != reports[1]) ++differing;
  }
  return pass_if(differing == 0, std::to_string(experiments - differing) + "/" +
                                     std::to_string(experiments) +
                                     " experiments byte-identical across runs and thread counts");
}

std::set<int> parse_list(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect_fail, only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if ((arg == "--expect-fail" || arg == "--only") && i + 1 < argc) {
      (arg == "--only" ? only : expect_fail) = parse_list(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--expect-fail N,...] [--only N,...]\n";
      return 1;
    }
  }

  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"table reproduction", table_reproduction},
      {"svd oracle", svd_oracle},
      {"clustering oracle", clustering_oracle},
      {"context-count conservation", context_conservation},
      {"token beats type", token_beats_type},
      {"natural-context filter", natural_contexts},
      {"brown corpus", brown_corpus},
      {"determinism", determinism},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(number)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const char* label = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Fail ? "FAIL" : "SKIPPED";
    std::string note;
    if (v.outcome == Outcome::Fail) {
      if (expect_fail.count(number)) {
        note = " [expected]";
      } else {
        ++unexpected;
      }
    }
    std::cout << label << " " << number << " " << criteria[i].first << ": " << v.detail << " ("
              << fmt(seconds_since(t0), 1) << " s)" << note << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}
