#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "posinduce/common.hpp"

namespace posinduce {

class ContainerWriter;
class ContainerReader;

inline constexpr std::int32_t kUnassigned = -1;

enum class Similarity { Cosine, Correlation };
std::string_view to_string(Similarity similarity);
Similarity parse_similarity(std::string_view text);

/// One agglomeration step. Clusters are named by their smallest member's
/// sample-local index; `from` is absorbed into `into` (into < from).
struct Merge {
  std::int32_t into;
  std::int32_t from;
  double similarity;
};

struct BuckshotOptions {
  int clusters = 200;
  /// Defaults to min(n, ceil(sqrt(clusters * n))).
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 1;
  Similarity similarity = Similarity::Cosine;
  int threads = 0;
};

std::size_t default_sample_size(std::size_t clusters, std::size_t n);

class ClusterModel {
 public:
  ClusterModel() = default;
  explicit ClusterModel(RowMatrix centroids,
                        Similarity similarity = Similarity::Cosine);

  int k() const { return static_cast<int>(centroids_.rows()); }
  int dims() const { return static_cast<int>(centroids_.cols()); }
  const RowMatrix& centroids() const { return centroids_; }
  Similarity similarity() const { return similarity_; }

  /// Point indices (into the clustered set) that were agglomerated, ascending.
  std::vector<std::int64_t> sample_ids;
  /// Agglomerative cluster of each sampled point, parallel to sample_ids.
  std::vector<std::int32_t> sample_assignment;
  /// Merge log, in order; not persisted.
  std::vector<Merge> merges;
  std::uint64_t seed = 0;

  bool operator==(const ClusterModel& other) const;

 private:
  friend std::int32_t assign(std::span<const double>, const ClusterModel&);

  RowMatrix centroids_;
  // Centroids normalized for the similarity kernel.
  RowMatrix unit_centroids_;
  Similarity similarity_ = Similarity::Cosine;
};

/// k, centroids, seed, similarity and the sample under `prefix`.
void write_cluster_model(const ClusterModel& model, const std::string& prefix,
                         ContainerWriter& out);
ClusterModel read_cluster_model(const ContainerReader& in,
                                const std::string& prefix);

/// Buckshot: group-average agglomeration of a uniform sample down to
/// `clusters` groups; centroids are member means.
///
/// Throws UsageError if clusters > sample size, NumericError when every
/// sampled point is identical and more than one cluster is requested.
ClusterModel buckshot(const RowMatrix& points, const BuckshotOptions& options);

/// Nearest centroid by the model's similarity; ties go to the lower id.
/// A zero point is kUnassigned.
std::int32_t assign(std::span<const double> point, const ClusterModel& model);

}  // namespace posinduce
