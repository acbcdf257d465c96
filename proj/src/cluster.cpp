#include "posinduce/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "posinduce/container.hpp"

namespace posinduce {
namespace {

// Rows scaled to unit length (after centering, for correlation) so that
// dot products are the similarity kernel; zero rows stay zero.
RowMatrix normalized_rows(const RowMatrix& points, Similarity similarity) {
  RowMatrix out = points;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    if (similarity == Similarity::Correlation && out.cols() > 0) {
      out.row(i).array() -= out.row(i).mean();
    }
    const double norm = out.row(i).norm();
    if (norm > 0.0) {
      out.row(i) /= norm;
    } else {
      out.row(i).setZero();
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Similarity similarity) {
  return similarity == Similarity::Cosine ? "cosine" : "correlation";
}

Similarity parse_similarity(std::string_view text) {
  if (text == "cosine") return Similarity::Cosine;
  if (text == "correlation") return Similarity::Correlation;
  throw UsageError("unknown similarity '" + std::string(text) + "'");
}

std::size_t default_sample_size(std::size_t clusters, std::size_t n) {
  const auto root = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(clusters) * static_cast<double>(n))));
  return std::min(n, std::max(root, clusters));
}

ClusterModel::ClusterModel(RowMatrix centroids, Similarity similarity)
    : centroids_(std::move(centroids)),
      unit_centroids_(normalized_rows(centroids_, similarity)),
      similarity_(similarity) {}

bool ClusterModel::operator==(const ClusterModel& other) const {
  return centroids_ == other.centroids_ && similarity_ == other.similarity_ &&
         sample_ids == other.sample_ids &&
         sample_assignment == other.sample_assignment && seed == other.seed;
}

void write_cluster_model(const ClusterModel& model, const std::string& prefix,
                         ContainerWriter& out) {
  out.meta(prefix + ".k", std::to_string(model.k()));
  out.meta(prefix + ".dims", std::to_string(model.dims()));
  out.meta(prefix + ".seed", std::to_string(model.seed));
  out.meta(prefix + ".similarity", std::string(to_string(model.similarity())));
  out.add_matrix(prefix + ".centroids", model.centroids());
  out.add_ints(prefix + ".sample_ids", std::span<const std::int64_t>(model.sample_ids));
  out.add_ints(prefix + ".sample_assignment",
               std::span<const std::int32_t>(model.sample_assignment));
}

ClusterModel read_cluster_model(const ContainerReader& in,
                                const std::string& prefix) {
  Similarity similarity;
  try {
    similarity = parse_similarity(in.meta(prefix + ".similarity"));
  } catch (const UsageError& e) {
    throw DataError(e.what());
  }
  ClusterModel model(in.matrix(prefix + ".centroids"), similarity);
  try {
    model.seed = std::stoull(in.meta(prefix + ".seed"));
  } catch (const std::logic_error&) {
    throw DataError("malformed cluster seed under '" + prefix + "'");
  }
  model.sample_ids = in.ints(prefix + ".sample_ids");
  model.sample_assignment = in.ints32(prefix + ".sample_assignment");
  if (model.sample_ids.size() != model.sample_assignment.size()) {
    throw DataError("cluster model '" + prefix + "': sample arrays differ in length");
  }
  return model;
}

ClusterModel buckshot(const RowMatrix& points, const BuckshotOptions& options) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (options.clusters < 1) throw UsageError("buckshot: need at least one cluster");
  const auto k = static_cast<std::size_t>(options.clusters);
  const std::size_t sample_size =
      options.sample_size.value_or(default_sample_size(k, n));
  if (sample_size > n) {
    throw UsageError("buckshot: sample size " + std::to_string(sample_size) +
                     " exceeds the " + std::to_string(n) + " points");
  }
  if (k > sample_size) {
    throw UsageError("buckshot: " + std::to_string(k) +
                     " clusters requested from a sample of " +
                     std::to_string(sample_size));
  }
  if (!points.allFinite()) throw UsageError("buckshot: non-finite input");

  Rng rng(options.seed);
  const std::vector<std::size_t> ids = sample_without_replacement(n, sample_size, rng);
  const auto s = ids.size();

  RowMatrix sample(static_cast<Eigen::Index>(s), points.cols());
  for (std::size_t i = 0; i < s; ++i) {
    sample.row(static_cast<Eigen::Index>(i)) =
        points.row(static_cast<Eigen::Index>(ids[i]));
  }
  if (k > 1) {
    bool identical = true;
    for (Eigen::Index i = 1; i < sample.rows() && identical; ++i) {
      identical = sample.row(i) == sample.row(0);
    }
    if (identical) {
      throw NumericError("buckshot: all sampled points are identical; cannot form " +
                         std::to_string(k) + " clusters");
    }
  }

  // sim(i, j) holds the group-average similarity between active clusters
  // named i and j, kept current by the Lance-Williams update.
  const RowMatrix unit = normalized_rows(sample, options.similarity);
  RowMatrix sim(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
  parallel_for(s, options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      sim.row(ii).noalias() = unit.row(ii) * unit.transpose();
    }
  });

  std::vector<std::int64_t> size(s, 1);
  std::vector<bool> active(s, true);
  std::vector<std::int32_t> best(s, -1);
  std::vector<double> best_sim(s, -std::numeric_limits<double>::infinity());

  const auto refresh = [&](std::size_t i) {
    best[i] = -1;
    best_sim[i] = -std::numeric_limits<double>::infinity();
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < s; ++j) {
      if (j == i || !active[j]) continue;
      const double v = sim(ii, static_cast<Eigen::Index>(j));
      if (v > best_sim[i]) {
        best_sim[i] = v;
        best[i] = static_cast<std::int32_t>(j);
      }
    }
  };
  for (std::size_t i = 0; i < s; ++i) refresh(i);

  std::vector<Merge> merges;
  merges.reserve(s - k);
  for (std::size_t remaining = s; remaining > k; --remaining) {
    // Highest similarity; ties resolve to the lexicographically smallest pair.
    std::size_t a = s;
    for (std::size_t i = 0; i < s; ++i) {
      if (active[i] && best[i] >= 0 && (a == s || best_sim[i] > best_sim[a])) a = i;
    }
    const auto b = static_cast<std::size_t>(best[a]);
    const std::size_t into = std::min(a, b);
    const std::size_t from = std::max(a, b);
    merges.push_back({static_cast<std::int32_t>(into),
                            static_cast<std::int32_t>(from), best_sim[a]});

    const auto wi = static_cast<double>(size[into]);
    const auto wf = static_cast<double>(size[from]);
    const auto ri = static_cast<Eigen::Index>(into);
    const auto rf = static_cast<Eigen::Index>(from);
    active[from] = false;
    size[into] += size[from];
    for (std::size_t x = 0; x < s; ++x) {
      if (!active[x] || x == into) continue;
      const auto rx = static_cast<Eigen::Index>(x);
      const double v = (wi * sim(ri, rx) + wf * sim(rf, rx)) / (wi + wf);
      sim(ri, rx) = v;
      sim(rx, ri) = v;
    }
    refresh(into);
    for (std::size_t x = 0; x < s; ++x) {
      if (!active[x] || x == into) continue;
      if (best[x] == static_cast<std::int32_t>(into) ||
          best[x] == static_cast<std::int32_t>(from)) {
        refresh(x);
        continue;
      }
      const double v = sim(static_cast<Eigen::Index>(x), ri);
      if (v > best_sim[x] ||
          (v == best_sim[x] && static_cast<std::int32_t>(into) < best[x])) {
        best_sim[x] = v;
        best[x] = static_cast<std::int32_t>(into);
      }
    }
  }

  // Resolve membership by replaying the merge log through union-find.
  std::vector<std::size_t> parent(s);
  for (std::size_t i = 0; i < s; ++i) parent[i] = i;
  for (const Merge& m : merges) {
    parent[static_cast<std::size_t>(m.from)] = static_cast<std::size_t>(m.into);
  }
  const auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i];
    return i;
  };
  std::vector<std::int32_t> label(s, -1);
  std::int32_t next = 0;
  for (std::size_t i = 0; i < s; ++i) {
    if (active[i]) label[i] = next++;
  }

  RowMatrix centroids = RowMatrix::Zero(static_cast<Eigen::Index>(k), points.cols());
  std::vector<std::int64_t> members(k, 0);
  std::vector<std::int32_t> assignment(s);
  for (std::size_t i = 0; i < s; ++i) {
    const std::int32_t c = label[root(i)];
    assignment[i] = c;
    centroids.row(c) += sample.row(static_cast<Eigen::Index>(i));
    ++members[static_cast<std::size_t>(c)];
  }
  for (std::size_t c = 0; c < k; ++c) {
    centroids.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(members[c]);
  }

  ClusterModel out(std::move(centroids), options.similarity);
  out.sample_ids.assign(ids.begin(), ids.end());
  out.sample_assignment = std::move(assignment);
  out.merges = std::move(merges);
  out.seed = options.seed;
  return out;
}

std::int32_t assign(std::span<const double> point, const ClusterModel& model) {
  if (static_cast<int>(point.size()) != model.dims()) {
    throw UsageError("assign: point has " + std::to_string(point.size()) +
                     " dimensions, model has " + std::to_string(model.dims()));
  }
  Eigen::RowVectorXd p =
      Eigen::Map<const Eigen::RowVectorXd>(point.data(), model.dims());
  if (model.similarity() == Similarity::Correlation) p.array() -= p.mean();
  const double norm = p.norm();
  if (norm == 0.0) return kUnassigned;
  p /= norm;
  const Eigen::VectorXd scores = model.unit_centroids_ * p.transpose();
  std::int32_t arg = kUnassigned;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (scores[j] > best) {
      best = scores[j];
      arg = static_cast<std::int32_t>(j);
    }
  }
  return arg;
}

}  // namespace posinduce
