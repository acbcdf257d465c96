#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "posinduce/common.hpp"

namespace posinduce {

class SparseCountMatrix;
class ContainerWriter;
class ContainerReader;

struct SvdOptions {
  /// Convergence threshold on the relative change of each retained
  /// singular value between iterations.
  double tolerance = 1e-8;
  int max_iterations = 1000;
  /// Extra subspace columns beyond the requested dimensionality.
  int oversample = 10;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// Truncated SVD factors of a count matrix: singular values S and right
/// singular vectors D, with training rows represented as C * D (= T * S).
class ReducedSpace {
 public:
  ReducedSpace() = default;
  ReducedSpace(Eigen::VectorXd singular_values, RowMatrix basis,
               RowMatrix row_embeddings, int requested_dims, int iterations);

  /// Retained dimensionality; may be below requested_dims for
  /// rank-deficient input.
  int dims() const { return static_cast<int>(singular_values_.size()); }
  int requested_dims() const { return requested_dims_; }
  int iterations() const { return iterations_; }
  std::int64_t n_cols() const { return basis_.rows(); }

  const Eigen::VectorXd& singular_values() const { return singular_values_; }
  /// n_cols x dims, orthonormal columns.
  const RowMatrix& basis() const { return basis_; }
  /// n_rows x dims; empty when not retained.
  const RowMatrix& row_embeddings() const { return row_embeddings_; }

  /// v * D for a dense raw feature vector.
  Eigen::VectorXd project(std::span<const double> v) const;
  /// v * D for a sparse count row.
  Eigen::VectorXd project(std::span<const std::int32_t> cols,
                          std::span<const std::int64_t> values) const;

  void drop_row_embeddings() { row_embeddings_.resize(0, 0); }

  bool operator==(const ReducedSpace& other) const;

 private:
  Eigen::VectorXd singular_values_;
  RowMatrix basis_;
  RowMatrix row_embeddings_;
  int requested_dims_ = 0;
  int iterations_ = 0;
};

/// Stores singular values and basis under `prefix` (row embeddings are
/// training-time data and are not written).
void write_reduced_space(const ReducedSpace& space, const std::string& prefix,
                         ContainerWriter& out);
ReducedSpace read_reduced_space(const ContainerReader& in,
                                const std::string& prefix);

/// Top-`dims` singular triplets of C by block subspace iteration with
/// Rayleigh-Ritz extraction.
///
/// Throws NumericError for an all-zero matrix or when the singular values
/// fail to converge within options.max_iterations.
ReducedSpace truncated_svd(const SparseCountMatrix& matrix, int dims,
                           const SvdOptions& options = {});

/// u.v / (|u||v|), or 0 when either norm is zero.
double cosine(std::span<const double> u, std::span<const double> v);
/// Pearson correlation: cosine of the mean-centered vectors.
double correlation(std::span<const double> u, std::span<const double> v);

namespace detail {

/// One-sided Jacobi SVD of a tall matrix A (rows >= cols):
/// A = U diag(sigma) V^T with sigma descending. U columns for zero singular
/// values are left zero.
struct JacobiResult {
  Eigen::VectorXd sigma;
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
};
JacobiResult jacobi_svd(Eigen::MatrixXd a);

/// Orthonormalizes the columns of `m` in place (Gram-Schmidt, twice);
/// dependent columns are replaced by random directions from `rng`.
void orthonormalize(Eigen::MatrixXd& m, Rng& rng);

}  // namespace detail

}  // namespace posinduce
