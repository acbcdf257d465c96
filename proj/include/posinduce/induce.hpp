#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "posinduce/cluster.hpp"
#include "posinduce/context.hpp"
#include "posinduce/corpus.hpp"
#include "posinduce/reduce.hpp"

namespace posinduce {

enum class Experiment { Type, Token, Natural, Generalized };
std::string_view to_string(Experiment experiment);
Experiment parse_experiment(std::string_view text);

struct InductionConfig {
  Experiment experiment = Experiment::Token;
  /// Feature words per context vector.
  int features = 250;
  /// Reduced dimensionality after SVD.
  int dims = 50;
  /// Induced tags.
  int clusters = 200;
  /// Neighbor classes for generalized context vectors.
  int neighbor_classes = 250;
  /// Token positions sampled for the token-level SVD and clustering.
  std::size_t sample = 20000;
  /// Neighbors rarer than this disqualify a natural context.
  std::int64_t rare_threshold = 10;
  std::uint64_t seed = 1;
  /// Buckshot agglomeration sample; unset uses the sqrt(k n) rule.
  std::optional<std::size_t> buckshot_sample;
  Similarity similarity = Similarity::Cosine;
  /// Worker threads for tagging; 0 = all cores. Never affects results.
  int threads = 0;

  /// Canonical `key<TAB>value` lines; threads is omitted.
  std::string serialize() const;
  static InductionConfig parse(std::string_view text);
  std::string fingerprint() const;

  bool operator==(const InductionConfig& other) const {
    return serialize() == other.serialize();
  }
};

enum class TokenState : std::uint8_t { Assigned, Unassigned, Skipped };
std::string_view to_string(TokenState state);

struct TokenLabel {
  TokenState state = TokenState::Unassigned;
  std::int32_t cluster = kUnassigned;

  bool operator==(const TokenLabel&) const = default;
};

/// One label per corpus position.
class InducedTagging {
 public:
  InducedTagging() = default;
  explicit InducedTagging(std::vector<TokenLabel> labels)
      : labels_(std::move(labels)) {}

  std::size_t size() const { return labels_.size(); }
  const TokenLabel& operator[](std::size_t pos) const { return labels_[pos]; }
  TokenLabel& operator[](std::size_t pos) { return labels_[pos]; }
  const std::vector<TokenLabel>& labels() const { return labels_; }
  std::size_t count(TokenState state) const;

  void write(std::ostream& out) const;
  static InducedTagging read(std::istream& in, const std::string& source);

  bool operator==(const InducedTagging&) const = default;

 private:
  std::vector<TokenLabel> labels_;
};

/// Left and right context vectors, word-based or generalized.
struct ContextMatrices {
  SparseCountMatrix left;
  SparseCountMatrix right;

  const SparseCountMatrix& side(Side s) const {
    return s == Side::Left ? left : right;
  }
};

/// [right(prev) | left(w) | right(w) | left(next)], each block `block_width`
/// wide; a missing neighbor contributes a zero block.
struct TokenFeature {
  std::int64_t block_width = 0;
  /// (column, count), ascending by column.
  std::vector<std::pair<std::int32_t, std::int64_t>> entries;

  bool is_zero() const { return entries.empty(); }
  std::vector<double> dense() const;
};

/// Word-based left and right vectors over the top config.features words.
ContextMatrices word_context_matrices(const Corpus& corpus,
                                      const InductionConfig& config);

struct GeneralizedContext {
  NeighborClassModel left_classes;
  NeighborClassModel right_classes;
  ContextMatrices vectors;
};

/// Neighbor classes from each side's word vectors, then generalized vectors.
GeneralizedContext generalized_context(const Corpus& corpus, const ContextMatrices& word,
                                       const InductionConfig& config);

TokenFeature token_feature_vector(const Corpus& corpus, std::size_t position,
                                  const ContextMatrices& matrices);

/// Both neighbors present, not punctuation, and at least rare_threshold
/// frequent. The focus word itself is not checked.
bool is_natural_context(const Corpus& corpus, std::size_t position,
                        const InductionConfig& config);

struct TypeModel {
  ReducedSpace space;
  ClusterModel clusters;
  /// word id -> induced tag, or kUnassigned for words with no context.
  std::vector<std::int32_t> type_tags;
};

/// Clusters word types by their concatenated left and right vectors.
TypeModel induce_type_model(const Corpus& corpus, const ContextMatrices& word,
                            const InductionConfig& config);

struct TokenModel {
  ReducedSpace space;
  ClusterModel clusters;
  /// Corpus positions forming the rows of the decomposed matrix.
  std::vector<std::int64_t> sample_positions;
  std::vector<std::string> warnings;
};

/// Clusters sampled token occurrences by their four-block context features.
TokenModel induce_token_model(const Corpus& corpus,
                              const ContextMatrices& matrices,
                              const InductionConfig& config);

/// Everything needed to tag text and to reproduce a run.
struct InductionModel {
  InductionConfig config;
  Vocabulary vocab;
  ContextMatrices word;
  /// Only for the generalized experiment.
  std::optional<NeighborClassModel> left_classes;
  std::optional<NeighborClassModel> right_classes;
  std::optional<ContextMatrices> generalized;

  ReducedSpace space;
  ClusterModel clusters;
  std::vector<std::int32_t> type_tags;
  std::vector<std::int64_t> sample_positions;
  /// Tagging of the training corpus.
  InducedTagging tagging;
  std::vector<std::string> warnings;

  const ContextMatrices& features() const {
    return generalized ? *generalized : word;
  }

  void write(std::ostream& out) const;
  static InductionModel read(std::istream& in, const std::string& source);
};

/// Runs one experiment end to end on a corpus and tags it.
InductionModel induce(const Corpus& corpus, const InductionConfig& config);

/// Tags every token of `corpus`, which must be encoded with model.vocab.
/// Throws UsageError when `config` disagrees with the model's configuration.
InducedTagging tag_corpus(const InductionModel& model, const Corpus& corpus,
                          const InductionConfig& config);
InducedTagging tag_corpus(const InductionModel& model, const Corpus& corpus);

/// Reduced space of one side's word-based context vectors.
ReducedSpace side_space(const InductionModel& model, Side side);

struct Neighbor {
  std::int32_t word;
  double similarity;
};

/// Top-n words by cosine in a word-row reduced space, query excluded;
/// ties resolved by frequency rank.
std::vector<Neighbor> nearest_neighbors(const Vocabulary& vocab,
                                        std::string_view word,
                                        const ReducedSpace& space,
                                        std::size_t n);

}  // namespace posinduce
