#include "posinduce/context.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "posinduce/cluster.hpp"
#include "posinduce/reduce.hpp"

namespace posinduce {
namespace {

constexpr std::string_view kMatrixMagic = "#posinduce-sparse-matrix";
constexpr int kMatrixVersion = 1;

FeatureKind parse_kind(std::string_view text) {
  if (text == "WORD") return FeatureKind::Word;
  if (text == "CLASS") return FeatureKind::Class;
  throw DataError("unknown feature kind '" + std::string(text) + "'");
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::Word ? "WORD" : "CLASS";
}

ContextFeatureSet ContextFeatureSet::top_words(const Vocabulary& vocab,
                                               std::size_t count) {
  if (count > vocab.size()) {
    throw UsageError("requested " + std::to_string(count) +
                     " feature words from a vocabulary of " +
                     std::to_string(vocab.size()));
  }
  return {FeatureKind::Word, vocab.top(count)};
}

ContextFeatureSet ContextFeatureSet::classes(std::size_t count) {
  ContextFeatureSet set{FeatureKind::Class, std::vector<std::int32_t>(count)};
  std::iota(set.feature_ids.begin(), set.feature_ids.end(), 0);
  return set;
}

SparseCountMatrix SparseCountMatrix::from_triplets(std::int64_t n_rows,
                                                   std::int64_t n_cols,
                                                   std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseCountMatrix m;
  m.n_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.row_ptr_.assign(static_cast<std::size_t>(n_rows) + 1, 0);
  std::int64_t last_row = -1;
  std::int32_t last_col = -1;
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
      throw DataError("matrix entry (" + std::to_string(t.row) + ", " +
                      std::to_string(t.col) + ") outside " +
                      std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }
    if (t.count < 0) throw DataError("negative count in count matrix");
    if (t.count == 0) continue;
    if (t.row == last_row && t.col == last_col) {
      m.values_.back() += t.count;
      continue;
    }
    m.col_idx_.push_back(t.col);
    m.values_.push_back(t.count);
    ++m.row_ptr_[static_cast<std::size_t>(t.row) + 1];
    last_row = t.row;
    last_col = t.col;
  }
  std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
  return m;
}

SparseCountMatrix SparseCountMatrix::from_dense(
    const std::vector<std::vector<std::int64_t>>& rows) {
  const auto n_rows = static_cast<std::int64_t>(rows.size());
  const auto n_cols = rows.empty() ? 0 : static_cast<std::int64_t>(rows[0].size());
  std::vector<Triplet> triplets;
  for (std::int64_t r = 0; r < n_rows; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<std::int64_t>(row.size()) != n_cols) {
      throw UsageError("from_dense: ragged rows");
    }
    for (std::int64_t c = 0; c < n_cols; ++c) {
      triplets.push_back({r, static_cast<std::int32_t>(c), row[static_cast<std::size_t>(c)]});
    }
  }
  auto m = from_triplets(n_rows, n_cols, std::move(triplets));
  m.col_labels.resize(static_cast<std::size_t>(n_cols));
  std::iota(m.col_labels.begin(), m.col_labels.end(), 0);
  return m;
}

std::int64_t SparseCountMatrix::at(std::int64_t row, std::int32_t col) const {
  const auto cols = row_cols(row);
  const auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it == cols.end() || *it != col) return 0;
  return row_values(row)[static_cast<std::size_t>(it - cols.begin())];
}

std::int64_t SparseCountMatrix::row_sum(std::int64_t row) const {
  const auto vals = row_values(row);
  return std::accumulate(vals.begin(), vals.end(), std::int64_t{0});
}

std::int64_t SparseCountMatrix::total() const {
  return std::accumulate(values_.begin(), values_.end(), std::int64_t{0});
}

Eigen::MatrixXd SparseCountMatrix::to_dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_rows_, n_cols_);
  for (std::int64_t r = 0; r < n_rows_; ++r) {
    const auto cols = row_cols(r);
    const auto vals = row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out(r, cols[k]) = static_cast<double>(vals[k]);
    }
  }
  return out;
}

bool SparseCountMatrix::operator==(const SparseCountMatrix& other) const {
  return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ &&
         row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_ &&
         values_ == other.values_ && kind == other.kind && side == other.side &&
         col_labels == other.col_labels && row_kind == other.row_kind;
}

void SparseCountMatrix::write(std::ostream& out) const {
  out << kMatrixMagic << '\t' << kMatrixVersion << '\n';
  out << "dims\t" << n_rows_ << '\t' << n_cols_ << '\n';
  out << "kind\t" << to_string(kind) << '\n';
  out << "side\t" << to_string(side) << '\n';
  out << "rows\t" << row_kind << '\n';
  out << "features";
  for (const auto id : col_labels) out << '\t' << id;
  out << '\n';
  out << "nnz\t" << nnz() << '\n';
  for (std::int64_t r = 0; r < n_rows_; ++r) {
    const auto cols = row_cols(r);
    const auto vals = row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out << r << '\t' << cols[k] << '\t' << vals[k] << '\n';
    }
  }
}

SparseCountMatrix SparseCountMatrix::read(std::istream& in,
                                          const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  const auto next_line = [&](std::string_view key) {
    if (!std::getline(in, line)) {
      throw DataError(source + ": truncated matrix header (missing '" +
                      std::string(key) + "')");
    }
    ++line_no;
    std::istringstream fields(line);
    std::string found;
    fields >> found;
    if (found != key) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected '" +
                      std::string(key) + "', found '" + found + "'");
    }
    std::string rest;
    std::getline(fields, rest);
    return rest;
  };

  if (!std::getline(in, line)) throw DataError(source + ": empty matrix file");
  ++line_no;
  const std::string expected =
      std::string(kMatrixMagic) + '\t' + std::to_string(kMatrixVersion);
  if (line != expected) {
    throw DataError(source + ": expected matrix header '" + expected +
                    "', found '" + line + "'");
  }
  std::int64_t n_rows = 0, n_cols = 0;
  std::istringstream(next_line("dims")) >> n_rows >> n_cols;
  std::string kind_text, side_text, rows_text;
  std::istringstream(next_line("kind")) >> kind_text;
  std::istringstream(next_line("side")) >> side_text;
  std::istringstream(next_line("rows")) >> rows_text;
  std::vector<std::int32_t> labels;
  {
    std::istringstream fields(next_line("features"));
    std::int32_t id;
    while (fields >> id) labels.push_back(id);
  }
  std::size_t nnz = 0;
  std::istringstream(next_line("nnz")) >> nnz;

  std::vector<Triplet> triplets;
  triplets.reserve(nnz);
  while (triplets.size() < nnz && std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    Triplet t{};
    if (!(fields >> t.row >> t.col >> t.count)) {
      throw DataError(source + ":" + std::to_string(line_no) +
                      ": expected row<TAB>col<TAB>count");
    }
    triplets.push_back(t);
  }
  if (triplets.size() != nnz) {
    throw DataError(source + ": expected " + std::to_string(nnz) +
                    " entries, found " + std::to_string(triplets.size()));
  }
  auto m = from_triplets(n_rows, n_cols, std::move(triplets));
  m.kind = parse_kind(kind_text);
  try {
    m.side = parse_side(side_text);
  } catch (const UsageError& e) {
    throw DataError(source + ": " + e.what());
  }
  m.row_kind = rows_text;
  m.col_labels = std::move(labels);
  return m;
}

SparseCountMatrix count_context_vectors(const Corpus& corpus,
                                        const ContextFeatureSet& features,
                                        Side side) {
  if (features.kind != FeatureKind::Word) {
    throw UsageError("count_context_vectors needs word features");
  }
  // word id -> feature column, or -1.
  std::vector<std::int32_t> column(corpus.vocab.size(), -1);
  for (std::size_t i = 0; i < features.size(); ++i) {
    column.at(static_cast<std::size_t>(features.feature_ids[i])) =
        static_cast<std::int32_t>(i);
  }

  std::vector<Triplet> triplets;
  triplets.reserve(corpus.size());
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    const std::int32_t w = corpus.tokens[p].form_id;
    if (w < 0) continue;
    const bool has = side == Side::Left ? corpus.has_left(p) : corpus.has_right(p);
    if (!has) continue;
    const std::int32_t neighbor =
        corpus.tokens[side == Side::Left ? p - 1 : p + 1].form_id;
    if (neighbor < 0) continue;
    const std::int32_t col = column[static_cast<std::size_t>(neighbor)];
    if (col >= 0) triplets.push_back({w, col, 1});
  }
  auto m = SparseCountMatrix::from_triplets(
      static_cast<std::int64_t>(corpus.vocab.size()),
      static_cast<std::int64_t>(features.size()), std::move(triplets));
  m.kind = FeatureKind::Word;
  m.side = side;
  m.col_labels = features.feature_ids;
  return m;
}

NeighborClassModel build_neighbor_classes(const SparseCountMatrix& word_matrix,
                                          const NeighborClassOptions& options) {
  if (word_matrix.kind != FeatureKind::Word) {
    throw UsageError("neighbor classes need a word-based context matrix");
  }
  const auto n_words = static_cast<std::size_t>(word_matrix.n_rows());
  const int dims = static_cast<int>(std::min<std::int64_t>(
      options.dims, std::min(word_matrix.n_rows(), word_matrix.n_cols())));
  SvdOptions svd;
  svd.seed = derive_seed(options.seed, "neighbor-svd");
  const ReducedSpace space = truncated_svd(word_matrix, dims, svd);

  // Words without any context carry no direction; they are placed afterwards.
  std::vector<std::int64_t> rows;
  for (std::size_t w = 0; w < n_words; ++w) {
    if (space.row_embeddings().row(static_cast<Eigen::Index>(w)).squaredNorm() > 0.0) {
      rows.push_back(static_cast<std::int64_t>(w));
    }
  }
  RowMatrix points(static_cast<Eigen::Index>(rows.size()), space.dims());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    points.row(static_cast<Eigen::Index>(i)) = space.row_embeddings().row(rows[i]);
  }

  // Small vocabularies may have fewer placeable words than requested classes.
  const int classes = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(options.classes), rows.size()));
  BuckshotOptions cluster;
  cluster.clusters = classes;
  if (options.sample_size) {
    cluster.sample_size = std::clamp(*options.sample_size, static_cast<std::size_t>(classes),
                                     rows.size());
  }
  cluster.seed = derive_seed(options.seed, "neighbor-buckshot");
  const ClusterModel model = buckshot(points, cluster);

  NeighborClassModel out;
  out.source_side = word_matrix.side;
  // Classes beyond the clamped count stay empty so both sides keep one width.
  out.classes = options.classes;
  out.word_class.assign(n_words, kUnassigned);
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(classes), 0);
  for (const auto c : model.sample_assignment) ++sizes[static_cast<std::size_t>(c)];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.word_class[static_cast<std::size_t>(rows[i])] =
        assign({points.row(r).data(), static_cast<std::size_t>(points.cols())}, model);
  }
  // Zero-vector words join the largest class so every adjacency is counted.
  const auto largest = static_cast<std::int32_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (auto& c : out.word_class) {
    if (c == kUnassigned) c = largest;
  }
  return out;
}

SparseCountMatrix generalized_context_vectors(const Corpus& corpus,
                                              const NeighborClassModel& classes,
                                              Side side) {
  if (classes.source_side != opposite(side)) {
    throw UsageError(std::string("generalized ") + std::string(to_string(side)) +
                     " vectors need classes built from " +
                     std::string(to_string(opposite(side))) +
                     " context vectors, got " +
                     std::string(to_string(classes.source_side)));
  }
  if (classes.word_class.size() != corpus.vocab.size()) {
    throw UsageError("neighbor-class model does not match the vocabulary");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(corpus.size());
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    const std::int32_t w = corpus.tokens[p].form_id;
    if (w < 0) continue;
    const bool has = side == Side::Left ? corpus.has_left(p) : corpus.has_right(p);
    if (!has) continue;
    const std::int32_t neighbor =
        corpus.tokens[side == Side::Left ? p - 1 : p + 1].form_id;
    if (neighbor < 0) continue;
    triplets.push_back({w, classes.word_class[static_cast<std::size_t>(neighbor)], 1});
  }
  auto m = SparseCountMatrix::from_triplets(
      static_cast<std::int64_t>(corpus.vocab.size()), classes.classes,
      std::move(triplets));
  m.kind = FeatureKind::Class;
  m.side = side;
  m.col_labels = ContextFeatureSet::classes(static_cast<std::size_t>(classes.classes))
                     .feature_ids;
  return m;
}

}  // namespace posinduce
