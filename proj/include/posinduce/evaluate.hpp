#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posinduce/corpus.hpp"
#include "posinduce/induce.hpp"

namespace posinduce {

/// Cluster id -> evaluation tag; kNoTag for clusters with no eligible member.
struct ClusterTagMapping {
  std::vector<TagId> cluster_tag;

  TagId at(std::int32_t cluster) const {
    return cluster >= 0 && static_cast<std::size_t>(cluster) < cluster_tag.size()
               ? cluster_tag[static_cast<std::size_t>(cluster)]
               : kNoTag;
  }
};

struct EvalOptions {
  /// Count UNASSIGNED gold tokens in recall denominators. SKIPPED tokens
  /// never count, so natural-context reports use filtered frequencies.
  bool count_unassigned = true;
};

struct TagScore {
  std::string tag;
  std::int64_t frequency = 0;
  std::int64_t n_classes = 0;
  std::int64_t correct = 0;
  std::int64_t incorrect = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;

  bool operator==(const TagScore&) const = default;
};

struct EvaluationReport {
  std::vector<TagScore> rows;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  /// Provenance; empty / unset for reports built from bare counts.
  std::string fingerprint;
  std::optional<std::uint64_t> seed;

  bool operator==(const EvaluationReport&) const = default;
};

/// F = 1 / (alpha/P + (1-alpha)/R); 0 when P or R is 0.
double f_measure(double precision, double recall, double alpha = 0.5);

/// Majority gold tag per cluster over eligible tokens (assigned, gold not
/// excluded). Ties go to the globally rarer tag, then the lower tag id.
/// Throws DataError on length mismatch or when nothing is eligible.
ClusterTagMapping map_clusters_to_tags(const InducedTagging& tagging,
                                       std::span<const Token> gold,
                                       std::size_t n_tags);

/// Per-tag counts and scores; rows for every tag with gold tokens.
EvaluationReport score(const InducedTagging& tagging, std::span<const Token> gold,
                       const ClusterTagMapping& mapping,
                       const std::vector<std::string>& tag_names,
                       const EvalOptions& options = {});

/// Fills precision, recall and F of a row from its counts.
TagScore score_counts(TagScore row);

/// Recomputes every row and the macro averages from the counts alone.
EvaluationReport rescore(const EvaluationReport& counts);

/// Fraction of gold-tagged, non-skipped tokens whose cluster maps to their
/// gold tag. `mask`, when given, selects the positions considered.
double many_to_one_accuracy(const InducedTagging& tagging,
                            std::span<const Token> gold,
                            const ClusterTagMapping& mapping,
                            const std::vector<bool>* mask = nullptr);

enum class ReportFormat { Text, Delimited };
ReportFormat parse_report_format(std::string_view text);

void render_report(const EvaluationReport& report, ReportFormat format,
                   std::ostream& out);
/// Reads the delimited format; also used for count fixtures.
EvaluationReport parse_report(std::istream& in, const std::string& source);

}  // namespace posinduce
