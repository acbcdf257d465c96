#include "posinduce/induce.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>

#include "posinduce/container.hpp"

namespace posinduce {
namespace {

constexpr std::string_view kTaggingMagic = "#posinduce-tagging";
constexpr int kTaggingVersion = 1;

TokenState parse_state(std::string_view text) {
  if (text == "ASSIGNED") return TokenState::Assigned;
  if (text == "UNASSIGNED") return TokenState::Unassigned;
  if (text == "SKIPPED") return TokenState::Skipped;
  throw DataError("unknown token state '" + std::string(text) + "'");
}

SvdOptions svd_options(const InductionConfig& config, std::string_view stage) {
  SvdOptions options;
  options.seed = derive_seed(config.seed, stage);
  return options;
}

// An explicit agglomeration sample larger than the point set uses every point.
BuckshotOptions buckshot_options(const InductionConfig& config,
                                 std::string_view stage, Eigen::Index points) {
  BuckshotOptions options;
  options.clusters = config.clusters;
  if (config.buckshot_sample) {
    options.sample_size =
        std::min(*config.buckshot_sample, static_cast<std::size_t>(points));
  }
  options.seed = derive_seed(config.seed, stage);
  options.similarity = config.similarity;
  options.threads = config.threads;
  return options;
}

std::span<const double> row_span(const RowMatrix& m, Eigen::Index row) {
  return {m.row(row).data(), static_cast<std::size_t>(m.cols())};
}

// Per-word projections of the four feature blocks, so a token's reduced
// vector is a sum of four precomputed rows.
class TokenProjector {
 public:
  TokenProjector(const ContextMatrices& matrices, const ReducedSpace& space)
      : matrices_(matrices) {
    const auto words = matrices.left.n_rows();
    const auto width = matrices.left.n_cols();
    const int dims = space.dims();
    const RowMatrix& basis = space.basis();
    for (int b = 0; b < 4; ++b) {
      const SparseCountMatrix& source = (b == 0 || b == 2) ? matrices.right : matrices.left;
      RowMatrix& block = blocks_[static_cast<std::size_t>(b)];
      block = RowMatrix::Zero(words, dims);
      for (std::int64_t w = 0; w < words; ++w) {
        const auto cols = source.row_cols(w);
        const auto vals = source.row_values(w);
        for (std::size_t k = 0; k < cols.size(); ++k) {
          block.row(w).noalias() +=
              static_cast<double>(vals[k]) * basis.row(b * width + cols[k]);
        }
      }
    }
  }

  /// Empty optional when all four raw blocks are zero.
  std::optional<Eigen::RowVectorXd> project(const Corpus& corpus,
                                            std::size_t pos) const {
    const std::int32_t w = corpus.tokens[pos].form_id;
    const std::int32_t prev =
        corpus.has_left(pos) ? corpus.tokens[pos - 1].form_id : kUnknownForm;
    const std::int32_t next =
        corpus.has_right(pos) ? corpus.tokens[pos + 1].form_id : kUnknownForm;
    const std::array<std::pair<int, std::int32_t>, 4> parts{
        {{0, prev}, {1, w}, {2, w}, {3, next}}};
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(blocks_[0].cols());
    bool any = false;
    for (const auto& [b, word] : parts) {
      if (word < 0) continue;
      const SparseCountMatrix& source = (b == 0 || b == 2) ? matrices_.right : matrices_.left;
      if (source.row_is_zero(word)) continue;
      out += blocks_[static_cast<std::size_t>(b)].row(word);
      any = true;
    }
    if (!any) return std::nullopt;
    return out;
  }

 private:
  const ContextMatrices& matrices_;
  std::array<RowMatrix, 4> blocks_;
};

void check_vocabulary(const InductionModel& model, const Corpus& corpus) {
  if (!(corpus.vocab == model.vocab)) {
    throw UsageError(
        "corpus is not encoded with the model's vocabulary; use encode_corpus");
  }
}

}  // namespace

InducedTagging tag_with_threads(const InductionModel& model, const Corpus& corpus,
                                int threads);

std::string_view to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::Type: return "TYPE";
    case Experiment::Token: return "TOKEN";
    case Experiment::Natural: return "NATURAL";
    case Experiment::Generalized: return "GENERALIZED";
  }
  return "?";
}

Experiment parse_experiment(std::string_view text) {
  std::string upper(text);
  for (char& c : upper) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  if (upper == "TYPE") return Experiment::Type;
  if (upper == "TOKEN") return Experiment::Token;
  if (upper == "NATURAL") return Experiment::Natural;
  if (upper == "GENERALIZED") return Experiment::Generalized;
  throw UsageError("unknown experiment '" + std::string(text) +
                   "' (expected type, token, natural or generalized)");
}

std::string_view to_string(TokenState state) {
  switch (state) {
    case TokenState::Assigned: return "ASSIGNED";
    case TokenState::Unassigned: return "UNASSIGNED";
    case TokenState::Skipped: return "SKIPPED";
  }
  return "?";
}

std::string InductionConfig::serialize() const {
  std::ostringstream out;
  out << "experiment\t" << to_string(experiment) << '\n'
      << "features\t" << features << '\n'
      << "dims\t" << dims << '\n'
      << "clusters\t" << clusters << '\n'
      << "neighbor_classes\t" << neighbor_classes << '\n'
      << "sample\t" << sample << '\n'
      << "rare_threshold\t" << rare_threshold << '\n'
      << "seed\t" << seed << '\n'
      << "buckshot_sample\t"
      << (buckshot_sample ? std::to_string(*buckshot_sample) : "auto") << '\n'
      << "similarity\t" << to_string(similarity) << '\n';
  return out.str();
}

InductionConfig InductionConfig::parse(std::string_view text) {
  InductionConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("malformed config line '" + line + "'");
    }
    const std::string key = line.substr(0, tab);
    const std::string value = line.substr(tab + 1);
    try {
      if (key == "experiment") config.experiment = parse_experiment(value);
      else if (key == "features") config.features = std::stoi(value);
      else if (key == "dims") config.dims = std::stoi(value);
      else if (key == "clusters") config.clusters = std::stoi(value);
      else if (key == "neighbor_classes") config.neighbor_classes = std::stoi(value);
      else if (key == "sample") config.sample = std::stoull(value);
      else if (key == "rare_threshold") config.rare_threshold = std::stoll(value);
      else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "buckshot_sample") {
        config.buckshot_sample =
            value == "auto" ? std::nullopt : std::optional<std::size_t>(std::stoull(value));
      } else if (key == "similarity") config.similarity = parse_similarity(value);
      else throw DataError("unknown config key '" + key + "'");
    } catch (const std::logic_error&) {
      throw DataError("malformed value for config key '" + key + "'");
    } catch (const UsageError& e) {
      throw DataError(e.what());
    }
  }
  return config;
}

std::string InductionConfig::fingerprint() const {
  return hex64(fnv1a64(serialize()));
}

std::size_t InducedTagging::count(TokenState state) const {
  return static_cast<std::size_t>(std::count_if(
      labels_.begin(), labels_.end(),
      [state](const TokenLabel& l) { return l.state == state; }));
}

void InducedTagging::write(std::ostream& out) const {
  out << kTaggingMagic << '\t' << kTaggingVersion << '\n';
  out << "tokens\t" << labels_.size() << '\n';
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out << i << '\t' << to_string(labels_[i].state) << '\t' << labels_[i].cluster
        << '\n';
  }
}

InducedTagging InducedTagging::read(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty tagging file");
  const std::string expected =
      std::string(kTaggingMagic) + '\t' + std::to_string(kTaggingVersion);
  if (line != expected) {
    throw DataError(source + ": expected tagging header '" + expected +
                    "', found '" + line + "'");
  }
  std::size_t n = 0;
  if (!std::getline(in, line) || line.rfind("tokens\t", 0) != 0) {
    throw DataError(source + ": missing token count");
  }
  try {
    n = std::stoull(line.substr(7));
  } catch (const std::logic_error&) {
    throw DataError(source + ": malformed token count");
  }
  std::vector<TokenLabel> labels;
  labels.reserve(n);
  std::size_t line_no = 2;
  while (labels.size() < n && std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::size_t pos;
    std::string state;
    std::int32_t cluster;
    if (!(fields >> pos >> state >> cluster) || pos != labels.size()) {
      throw DataError(source + ":" + std::to_string(line_no) +
                      ": expected position<TAB>state<TAB>cluster in order");
    }
    try {
      labels.push_back({parse_state(state), cluster});
    } catch (const DataError& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (labels.size() != n) {
    throw DataError(source + ": expected " + std::to_string(n) + " records, found " +
                    std::to_string(labels.size()));
  }
  return InducedTagging(std::move(labels));
}

std::vector<double> TokenFeature::dense() const {
  std::vector<double> out(static_cast<std::size_t>(4 * block_width), 0.0);
  for (const auto& [col, count] : entries) {
    out[static_cast<std::size_t>(col)] = static_cast<double>(count);
  }
  return out;
}

TokenFeature token_feature_vector(const Corpus& corpus, std::size_t position,
                                  const ContextMatrices& matrices) {
  TokenFeature feature;
  feature.block_width = matrices.left.n_cols();
  const std::int32_t w = corpus.tokens.at(position).form_id;
  const std::int32_t prev =
      corpus.has_left(position) ? corpus.tokens[position - 1].form_id : kUnknownForm;
  const std::int32_t next =
      corpus.has_right(position) ? corpus.tokens[position + 1].form_id : kUnknownForm;
  const std::array<std::pair<const SparseCountMatrix*, std::int32_t>, 4> blocks{
      {{&matrices.right, prev},
       {&matrices.left, w},
       {&matrices.right, w},
       {&matrices.left, next}}};
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& [matrix, word] = blocks[b];
    if (word < 0) continue;
    const auto cols = matrix->row_cols(word);
    const auto vals = matrix->row_values(word);
    const auto offset = static_cast<std::int32_t>(b) *
                        static_cast<std::int32_t>(feature.block_width);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      feature.entries.emplace_back(offset + cols[k], vals[k]);
    }
  }
  return feature;
}

bool is_natural_context(const Corpus& corpus, std::size_t position,
                        const InductionConfig& config) {
  if (!corpus.has_left(position) || !corpus.has_right(position)) return false;
  for (const std::size_t p : {position - 1, position + 1}) {
    const Token& t = corpus.tokens[p];
    if (t.is_punct || t.form_id < 0) return false;
    if (corpus.vocab.freq(t.form_id) < config.rare_threshold) return false;
  }
  return true;
}

TypeModel induce_type_model(const Corpus& corpus, const ContextMatrices& word,
                            const InductionConfig& config) {
  const std::int64_t words = word.left.n_rows();
  const std::int64_t width = word.left.n_cols();
  std::vector<Triplet> triplets;
  triplets.reserve(word.left.nnz() + word.right.nnz());
  for (std::int64_t w = 0; w < words; ++w) {
    for (int half = 0; half < 2; ++half) {
      const SparseCountMatrix& m = half == 0 ? word.left : word.right;
      const auto cols = m.row_cols(w);
      const auto vals = m.row_values(w);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        triplets.push_back(
            {w, static_cast<std::int32_t>(half * width + cols[k]), vals[k]});
      }
    }
  }
  const auto concatenated =
      SparseCountMatrix::from_triplets(words, 2 * width, std::move(triplets));
  if (static_cast<std::int64_t>(corpus.vocab.size()) != words) {
    throw UsageError("context matrices do not match the corpus vocabulary");
  }

  TypeModel model;
  model.space = truncated_svd(concatenated, config.dims, svd_options(config, "type-svd"));
  const RowMatrix& embeddings = model.space.row_embeddings();

  std::vector<std::int64_t> rows;
  for (std::int64_t w = 0; w < words; ++w) {
    if (!concatenated.row_is_zero(w)) rows.push_back(w);
  }
  RowMatrix points(static_cast<Eigen::Index>(rows.size()), model.space.dims());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    points.row(static_cast<Eigen::Index>(i)) = embeddings.row(rows[i]);
  }
  model.clusters = buckshot(points, buckshot_options(config, "type-buckshot", points.rows()));
  model.type_tags.assign(static_cast<std::size_t>(words), kUnassigned);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    model.type_tags[static_cast<std::size_t>(rows[i])] =
        assign(row_span(points, static_cast<Eigen::Index>(i)), model.clusters);
  }
  return model;
}

TokenModel induce_token_model(const Corpus& corpus,
                              const ContextMatrices& matrices,
                              const InductionConfig& config) {
  TokenModel model;
  std::vector<std::size_t> eligible;
  eligible.reserve(corpus.size());
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    if (config.experiment == Experiment::Natural &&
        !is_natural_context(corpus, p, config)) {
      continue;
    }
    eligible.push_back(p);
  }
  std::size_t count = config.sample;
  if (eligible.size() < count) {
    model.warnings.push_back("only " + std::to_string(eligible.size()) +
                             " eligible positions for a sample of " +
                             std::to_string(config.sample) + "; using all");
    count = eligible.size();
  }
  Rng rng(derive_seed(config.seed, "token-sample"));
  const auto picks = sample_without_replacement(eligible.size(), count, rng);

  std::vector<Triplet> triplets;
  std::size_t dropped = 0;
  for (const std::size_t i : picks) {
    const std::size_t pos = eligible[i];
    const TokenFeature feature = token_feature_vector(corpus, pos, matrices);
    if (feature.is_zero()) {
      ++dropped;
      continue;
    }
    const auto row = static_cast<std::int64_t>(model.sample_positions.size());
    for (const auto& [col, value] : feature.entries) triplets.push_back({row, col, value});
    model.sample_positions.push_back(static_cast<std::int64_t>(pos));
  }
  if (dropped > 0) {
    model.warnings.push_back(std::to_string(dropped) +
                             " sampled positions had all-zero features and were dropped");
  }
  if (model.sample_positions.empty()) {
    throw NumericError("no sampled position has a non-zero context feature");
  }
  auto matrix = SparseCountMatrix::from_triplets(
      static_cast<std::int64_t>(model.sample_positions.size()),
      4 * matrices.left.n_cols(), std::move(triplets));
  matrix.row_kind = "token";

  model.space = truncated_svd(matrix, config.dims, svd_options(config, "token-svd"));
  const RowMatrix& embeddings = model.space.row_embeddings();
  model.clusters = buckshot(
      embeddings, buckshot_options(config, "token-buckshot", embeddings.rows()));
  return model;
}

ContextMatrices word_context_matrices(const Corpus& corpus,
                                      const InductionConfig& config) {
  const auto features =
      ContextFeatureSet::top_words(corpus.vocab, static_cast<std::size_t>(config.features));
  return {count_context_vectors(corpus, features, Side::Left),
          count_context_vectors(corpus, features, Side::Right)};
}

GeneralizedContext generalized_context(const Corpus& corpus, const ContextMatrices& word,
                                       const InductionConfig& config) {
  NeighborClassOptions options;
  options.dims = config.dims;
  options.classes = config.neighbor_classes;
  options.seed = derive_seed(config.seed, "left-classes");
  GeneralizedContext out;
  out.left_classes = build_neighbor_classes(word.left, options);
  options.seed = derive_seed(config.seed, "right-classes");
  out.right_classes = build_neighbor_classes(word.right, options);
  // Right vectors count classes of left vectors and vice versa.
  out.vectors.right = generalized_context_vectors(corpus, out.left_classes, Side::Right);
  out.vectors.left = generalized_context_vectors(corpus, out.right_classes, Side::Left);
  return out;
}

InductionModel induce(const Corpus& corpus, const InductionConfig& config) {
  InductionModel model;
  model.config = config;
  model.vocab = corpus.vocab;
  model.word = word_context_matrices(corpus, config);

  if (config.experiment == Experiment::Type) {
    TypeModel type = induce_type_model(corpus, model.word, config);
    model.space = std::move(type.space);
    model.clusters = std::move(type.clusters);
    model.type_tags = std::move(type.type_tags);
  } else {
    if (config.experiment == Experiment::Generalized) {
      GeneralizedContext g = generalized_context(corpus, model.word, config);
      model.left_classes = std::move(g.left_classes);
      model.right_classes = std::move(g.right_classes);
      model.generalized = std::move(g.vectors);
    }
    TokenModel token = induce_token_model(corpus, model.features(), config);
    model.space = std::move(token.space);
    model.clusters = std::move(token.clusters);
    model.sample_positions = std::move(token.sample_positions);
    model.warnings = std::move(token.warnings);
  }
  model.space.drop_row_embeddings();
  model.tagging = tag_corpus(model, corpus);
  return model;
}

InducedTagging tag_corpus(const InductionModel& model, const Corpus& corpus,
                          const InductionConfig& config) {
  const InductionConfig& trained = model.config;
  if (config.experiment != trained.experiment || config.features != trained.features ||
      config.dims != trained.dims || config.clusters != trained.clusters ||
      config.rare_threshold != trained.rare_threshold) {
    throw UsageError("tagging configuration does not match the model (" +
                     std::string(to_string(config.experiment)) + " vs " +
                     std::string(to_string(trained.experiment)) + ")");
  }
  return tag_with_threads(model, corpus, config.threads);
}

InducedTagging tag_corpus(const InductionModel& model, const Corpus& corpus) {
  return tag_with_threads(model, corpus, model.config.threads);
}

InducedTagging tag_with_threads(const InductionModel& model, const Corpus& corpus,
                                int threads) {
  check_vocabulary(model, corpus);
  std::vector<TokenLabel> labels(corpus.size());

  if (model.config.experiment == Experiment::Type) {
    for (std::size_t p = 0; p < corpus.size(); ++p) {
      const std::int32_t w = corpus.tokens[p].form_id;
      const std::int32_t tag =
          w < 0 ? kUnassigned : model.type_tags[static_cast<std::size_t>(w)];
      labels[p] = tag == kUnassigned ? TokenLabel{}
                                     : TokenLabel{TokenState::Assigned, tag};
    }
    return InducedTagging(std::move(labels));
  }

  const TokenProjector projector(model.features(), model.space);
  const bool natural = model.config.experiment == Experiment::Natural;
  parallel_for(corpus.size(), threads,
               [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      if (natural && !is_natural_context(corpus, p, model.config)) {
        labels[p] = {TokenState::Skipped, kUnassigned};
        continue;
      }
      const auto reduced = projector.project(corpus, p);
      if (!reduced) continue;
      const std::int32_t c = assign(
          {reduced->data(), static_cast<std::size_t>(reduced->size())}, model.clusters);
      if (c != kUnassigned) labels[p] = {TokenState::Assigned, c};
    }
  });
  return InducedTagging(std::move(labels));
}

ReducedSpace side_space(const InductionModel& model, Side side) {
  const SparseCountMatrix& m = model.word.side(side);
  const int dims = static_cast<int>(
      std::min<std::int64_t>(model.config.dims, std::min(m.n_rows(), m.n_cols())));
  return truncated_svd(m, dims,
                       svd_options(model.config, side == Side::Left ? "side-left" : "side-right"));
}

std::vector<Neighbor> nearest_neighbors(const Vocabulary& vocab,
                                        std::string_view word,
                                        const ReducedSpace& space,
                                        std::size_t n) {
  const auto query = vocab.find(word);
  if (!query) throw DataError("word '" + std::string(word) + "' is not in the vocabulary");
  const RowMatrix& rows = space.row_embeddings();
  if (rows.rows() != static_cast<Eigen::Index>(vocab.size())) {
    throw UsageError("nearest_neighbors needs a space with one row per word");
  }
  std::vector<Neighbor> all;
  all.reserve(vocab.size());
  const auto q = row_span(rows, *query);
  for (Eigen::Index w = 0; w < rows.rows(); ++w) {
    if (w == *query) continue;
    all.push_back({static_cast<std::int32_t>(w), cosine(q, row_span(rows, w))});
  }
  n = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                    [&](const Neighbor& a, const Neighbor& b) {
                      if (a.similarity != b.similarity) return a.similarity > b.similarity;
                      return vocab.rank(a.word) < vocab.rank(b.word);
                    });
  all.resize(n);
  return all;
}

void InductionModel::write(std::ostream& out) const {
  ContainerWriter c("bundle");
  c.meta("experiment", std::string(to_string(config.experiment)));
  c.meta("config_fingerprint", config.fingerprint());
  c.meta("seed", std::to_string(config.seed));
  c.meta("vocabulary_fingerprint", [&] {
    std::ostringstream v;
    vocab.write(v);
    return hex64(fnv1a64(v.str()));
  }());
  c.add_text("config", config.serialize());
  {
    std::ostringstream v;
    vocab.write(v);
    c.add_text("vocabulary", v.str());
  }
  const auto add_matrix = [&](const std::string& name, const SparseCountMatrix& m) {
    std::ostringstream s;
    m.write(s);
    c.add_text(name, s.str());
  };
  add_matrix("word.left", word.left);
  add_matrix("word.right", word.right);
  if (generalized) {
    add_matrix("generalized.left", generalized->left);
    add_matrix("generalized.right", generalized->right);
    c.meta("left_classes.count", std::to_string(left_classes->classes));
    c.meta("right_classes.count", std::to_string(right_classes->classes));
    c.add_ints("left_classes.word_class", std::span<const std::int32_t>(left_classes->word_class));
    c.add_ints("right_classes.word_class", std::span<const std::int32_t>(right_classes->word_class));
  }
  write_reduced_space(space, "space", c);
  write_cluster_model(clusters, "clusters", c);
  c.add_ints("type_tags", std::span<const std::int32_t>(type_tags));
  c.add_ints("sample_positions", std::span<const std::int64_t>(sample_positions));
  std::vector<std::int32_t> states, ids;
  states.reserve(tagging.size());
  ids.reserve(tagging.size());
  for (const auto& l : tagging.labels()) {
    states.push_back(static_cast<std::int32_t>(l.state));
    ids.push_back(l.cluster);
  }
  c.add_ints("tagging.state", std::span<const std::int32_t>(states));
  c.add_ints("tagging.cluster", std::span<const std::int32_t>(ids));
  c.write(out);
}

InductionModel InductionModel::read(std::istream& in, const std::string& source) {
  const ContainerReader c = ContainerReader::read(in, "bundle", source);
  InductionModel model;
  model.config = InductionConfig::parse(c.text("config"));
  {
    std::istringstream v(c.text("vocabulary"));
    model.vocab = Vocabulary::read(v, source + "[vocabulary]");
  }
  const auto read_matrix = [&](const std::string& name) {
    std::istringstream s(c.text(name));
    return SparseCountMatrix::read(s, source + "[" + name + "]");
  };
  model.word.left = read_matrix("word.left");
  model.word.right = read_matrix("word.right");
  if (c.has_section("generalized.left")) {
    model.generalized = ContextMatrices{read_matrix("generalized.left"),
                                        read_matrix("generalized.right")};
    NeighborClassModel left{Side::Left, std::stoi(c.meta("left_classes.count")),
                            c.ints32("left_classes.word_class")};
    NeighborClassModel right{Side::Right, std::stoi(c.meta("right_classes.count")),
                             c.ints32("right_classes.word_class")};
    model.left_classes = std::move(left);
    model.right_classes = std::move(right);
  }
  model.space = read_reduced_space(c, "space");
  model.clusters = read_cluster_model(c, "clusters");
  model.type_tags = c.ints32("type_tags");
  model.sample_positions = c.ints("sample_positions");
  const auto states = c.ints32("tagging.state");
  const auto ids = c.ints32("tagging.cluster");
  if (states.size() != ids.size()) throw DataError(source + ": tagging arrays differ");
  std::vector<TokenLabel> labels(states.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (states[i] < 0 || states[i] > 2) throw DataError(source + ": bad token state");
    labels[i] = {static_cast<TokenState>(states[i]), ids[i]};
  }
  model.tagging = InducedTagging(std::move(labels));

  if (model.word.left.n_rows() != static_cast<std::int64_t>(model.vocab.size())) {
    throw DataError(source + ": context matrices do not match the vocabulary");
  }
  if (model.config.experiment != Experiment::Type &&
      model.space.n_cols() != 4 * model.features().left.n_cols()) {
    throw DataError(source + ": reduced space does not match the feature width");
  }
  return model;
}

}  // namespace posinduce
