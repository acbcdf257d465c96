#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posinduce/common.hpp"
#include "posinduce/corpus.hpp"

namespace posinduce {

enum class FeatureKind { Word, Class };
std::string_view to_string(FeatureKind kind);

/// What the columns of a context matrix count.
struct ContextFeatureSet {
  FeatureKind kind = FeatureKind::Word;
  /// Column i -> word id (Word) or neighbor-class id (Class).
  std::vector<std::int32_t> feature_ids;

  std::size_t size() const { return feature_ids.size(); }

  /// The `count` top-ranked vocabulary entries.
  static ContextFeatureSet top_words(const Vocabulary& vocab, std::size_t count);
  static ContextFeatureSet classes(std::size_t count);
};

struct Triplet {
  std::int64_t row;
  std::int32_t col;
  std::int64_t count;
};

/// Non-negative integer counts in compressed-row form.
class SparseCountMatrix {
 public:
  SparseCountMatrix() = default;

  /// Duplicate (row, col) triplets are summed; zero counts dropped.
  static SparseCountMatrix from_triplets(std::int64_t n_rows,
                                         std::int64_t n_cols,
                                         std::vector<Triplet> triplets);
  /// Rows given as dense integer vectors; convenient for small fixtures.
  static SparseCountMatrix from_dense(
      const std::vector<std::vector<std::int64_t>>& rows);

  std::int64_t n_rows() const { return n_rows_; }
  std::int64_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::int32_t> row_cols(std::int64_t row) const {
    const auto b = row_ptr_[static_cast<std::size_t>(row)];
    const auto e = row_ptr_[static_cast<std::size_t>(row) + 1];
    return {col_idx_.data() + b, e - b};
  }
  std::span<const std::int64_t> row_values(std::int64_t row) const {
    const auto b = row_ptr_[static_cast<std::size_t>(row)];
    const auto e = row_ptr_[static_cast<std::size_t>(row) + 1];
    return {values_.data() + b, e - b};
  }
  std::int64_t at(std::int64_t row, std::int32_t col) const;
  std::int64_t row_sum(std::int64_t row) const;
  bool row_is_zero(std::int64_t row) const { return row_cols(row).empty(); }
  std::int64_t total() const;

  Eigen::MatrixXd to_dense() const;

  // Descriptive labels, persisted with the matrix.
  FeatureKind kind = FeatureKind::Word;
  Side side = Side::Left;
  std::vector<std::int32_t> col_labels;
  /// "word" or "token"; what the rows index.
  std::string row_kind = "word";

  void write(std::ostream& out) const;
  static SparseCountMatrix read(std::istream& in, const std::string& source);

  bool operator==(const SparseCountMatrix& other) const;

 private:
  std::int64_t n_rows_ = 0;
  std::int64_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::int32_t> col_idx_;
  std::vector<std::int64_t> values_;
};

/// Word-based context vectors: row w counts, per feature word, how often
/// that word is the immediate `side` neighbor of an occurrence of w.
SparseCountMatrix count_context_vectors(const Corpus& corpus,
                                        const ContextFeatureSet& features,
                                        Side side);

/// Word -> class partition derived from one side's context vectors.
struct NeighborClassModel {
  /// Side of the word-based vectors that were clustered.
  Side source_side = Side::Left;
  std::int32_t classes = 0;
  std::vector<std::int32_t> word_class;

  bool operator==(const NeighborClassModel&) const = default;
};

struct NeighborClassOptions {
  int dims = 50;
  int classes = 250;
  std::uint64_t seed = 1;
  std::optional<std::size_t> sample_size;
};

/// Reduces a V x f word-based matrix by truncated SVD and clusters every
/// word into `classes` groups with Buckshot.
NeighborClassModel build_neighbor_classes(const SparseCountMatrix& word_matrix,
                                          const NeighborClassOptions& options);

/// Generalized context vectors: row w, column i counts `side` neighbors of w
/// that belong to class i. Requires classes built from the opposite side.
SparseCountMatrix generalized_context_vectors(const Corpus& corpus,
                                              const NeighborClassModel& classes,
                                              Side side);

}  // namespace posinduce
