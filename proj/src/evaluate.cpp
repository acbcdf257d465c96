#include "posinduce/evaluate.hpp"

#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace posinduce {
namespace {

constexpr std::string_view kReportMagic = "#posinduce-report";
constexpr int kReportVersion = 1;
constexpr std::string_view kHeader =
    "tag\tfrequency\tclasses\tcorrect\tincorrect\tprecision\trecall\tF";

void check_aligned(const InducedTagging& tagging, std::span<const Token> gold) {
  if (tagging.size() != gold.size()) {
    throw DataError("tagging has " + std::to_string(tagging.size()) +
                    " tokens but the gold standard has " +
                    std::to_string(gold.size()));
  }
}

bool eligible(const TokenLabel& label, const Token& token) {
  return label.state == TokenState::Assigned && token.gold_tag >= 0;
}

std::string format_double(double v, const char* format) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

void macro_average(EvaluationReport& report) {
  report.precision = report.recall = report.f = 0.0;
  if (report.rows.empty()) return;
  for (const auto& r : report.rows) {
    report.precision += r.precision;
    report.recall += r.recall;
    report.f += r.f;
  }
  const auto n = static_cast<double>(report.rows.size());
  report.precision /= n;
  report.recall /= n;
  report.f /= n;
}

}  // namespace

double f_measure(double precision, double recall, double alpha) {
  if (precision <= 0.0 || recall <= 0.0) return 0.0;
  return 1.0 / (alpha / precision + (1.0 - alpha) / recall);
}

ClusterTagMapping map_clusters_to_tags(const InducedTagging& tagging,
                                       std::span<const Token> gold,
                                       std::size_t n_tags) {
  check_aligned(tagging, gold);
  std::int32_t max_cluster = -1;
  for (const auto& l : tagging.labels()) {
    if (l.state == TokenState::Assigned) max_cluster = std::max(max_cluster, l.cluster);
  }
  const auto k = static_cast<std::size_t>(max_cluster + 1);
  std::vector<std::int64_t> counts(k * n_tags, 0);
  std::vector<std::int64_t> global(n_tags, 0);
  std::int64_t total = 0;
  for (std::size_t p = 0; p < gold.size(); ++p) {
    if (!eligible(tagging[p], gold[p])) continue;
    const auto t = static_cast<std::size_t>(gold[p].gold_tag);
    if (t >= n_tags) throw DataError("gold tag id out of range");
    ++counts[static_cast<std::size_t>(tagging[p].cluster) * n_tags + t];
    ++global[t];
    ++total;
  }
  if (total == 0) throw DataError("no eligible tokens to evaluate");

  ClusterTagMapping mapping;
  mapping.cluster_tag.assign(k, kNoTag);
  for (std::size_t c = 0; c < k; ++c) {
    TagId best = kNoTag;
    for (std::size_t t = 0; t < n_tags; ++t) {
      const auto n = counts[c * n_tags + t];
      if (n == 0) continue;
      if (best == kNoTag) {
        best = static_cast<TagId>(t);
        continue;
      }
      const auto b = static_cast<std::size_t>(best);
      const auto nb = counts[c * n_tags + b];
      if (n > nb || (n == nb && global[t] < global[b])) best = static_cast<TagId>(t);
    }
    mapping.cluster_tag[c] = best;
  }
  return mapping;
}

TagScore score_counts(TagScore row) {
  const auto denom = row.correct + row.incorrect;
  row.precision = denom > 0 ? static_cast<double>(row.correct) / static_cast<double>(denom) : 0.0;
  row.recall = row.frequency > 0
                   ? static_cast<double>(row.correct) / static_cast<double>(row.frequency)
                   : 0.0;
  row.f = f_measure(row.precision, row.recall);
  return row;
}

EvaluationReport rescore(const EvaluationReport& counts) {
  EvaluationReport out = counts;
  for (auto& r : out.rows) r = score_counts(r);
  macro_average(out);
  return out;
}

EvaluationReport score(const InducedTagging& tagging, std::span<const Token> gold,
                       const ClusterTagMapping& mapping,
                       const std::vector<std::string>& tag_names,
                       const EvalOptions& options) {
  check_aligned(tagging, gold);
  const std::size_t n_tags = tag_names.size();
  std::vector<TagScore> rows(n_tags);
  std::vector<bool> present(n_tags, false);
  for (std::size_t t = 0; t < n_tags; ++t) rows[t].tag = tag_names[t];

  for (std::size_t p = 0; p < gold.size(); ++p) {
    const TagId g = gold[p].gold_tag;
    if (g < 0) continue;
    if (static_cast<std::size_t>(g) >= n_tags) throw DataError("gold tag id out of range");
    const TokenLabel& label = tagging[p];
    present[static_cast<std::size_t>(g)] = true;
    if (label.state == TokenState::Skipped) continue;
    if (label.state == TokenState::Unassigned) {
      if (options.count_unassigned) ++rows[static_cast<std::size_t>(g)].frequency;
      continue;
    }
    ++rows[static_cast<std::size_t>(g)].frequency;
    const TagId m = mapping.at(label.cluster);
    if (m < 0) continue;
    if (m == g) {
      ++rows[static_cast<std::size_t>(m)].correct;
    } else {
      ++rows[static_cast<std::size_t>(m)].incorrect;
    }
  }
  for (const TagId t : mapping.cluster_tag) {
    if (t >= 0) ++rows[static_cast<std::size_t>(t)].n_classes;
  }

  EvaluationReport report;
  for (std::size_t t = 0; t < n_tags; ++t) {
    if (present[t]) report.rows.push_back(score_counts(rows[t]));
  }
  macro_average(report);
  return report;
}

double many_to_one_accuracy(const InducedTagging& tagging,
                            std::span<const Token> gold,
                            const ClusterTagMapping& mapping,
                            const std::vector<bool>* mask) {
  check_aligned(tagging, gold);
  if (mask && mask->size() != gold.size()) throw DataError("mask length mismatch");
  std::int64_t hits = 0, total = 0;
  for (std::size_t p = 0; p < gold.size(); ++p) {
    if (gold[p].gold_tag < 0 || tagging[p].state == TokenState::Skipped) continue;
    if (mask && !(*mask)[p]) continue;
    ++total;
    if (tagging[p].state == TokenState::Assigned &&
        mapping.at(tagging[p].cluster) == gold[p].gold_tag) {
      ++hits;
    }
  }
  return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "text" || text == "TEXT") return ReportFormat::Text;
  if (text == "delimited" || text == "DELIMITED" || text == "tsv") {
    return ReportFormat::Delimited;
  }
  throw UsageError("unknown report format '" + std::string(text) +
                   "' (expected text or delimited)");
}

void render_report(const EvaluationReport& report, ReportFormat format,
                   std::ostream& out) {
  const std::string fingerprint = report.fingerprint.empty() ? "-" : report.fingerprint;
  const std::string seed = report.seed ? std::to_string(*report.seed) : "-";
  if (format == ReportFormat::Delimited) {
    out << kReportMagic << '\t' << kReportVersion << '\n'
        << "fingerprint\t" << fingerprint << '\n'
        << "seed\t" << seed << '\n'
        << kHeader << '\n';
    for (const auto& r : report.rows) {
      out << r.tag << '\t' << r.frequency << '\t' << r.n_classes << '\t' << r.correct
          << '\t' << r.incorrect << '\t' << format_double(r.precision, "%.17g") << '\t'
          << format_double(r.recall, "%.17g") << '\t' << format_double(r.f, "%.17g")
          << '\n';
    }
    out << "avg.\t\t\t\t\t" << format_double(report.precision, "%.17g") << '\t'
        << format_double(report.recall, "%.17g") << '\t'
        << format_double(report.f, "%.17g") << '\n';
    return;
  }

  out << "config " << fingerprint << "  seed " << seed << '\n';
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %10s %9s %9s %9s %9s %6s %5s\n", "tag",
                "frequency", "# classes", "correct", "incorrect", "precision",
                "recall", "F");
  out << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line,
                  "%-6s %10" PRId64 " %9" PRId64 " %9" PRId64 " %9" PRId64
                  " %9.2f %6.2f %5.2f\n",
                  r.tag.c_str(), r.frequency, r.n_classes, r.correct, r.incorrect,
                  r.precision, r.recall, r.f);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-6s %10s %9s %9s %9s %9.2f %6.2f %5.2f\n", "avg.",
                "", "", "", "", report.precision, report.recall, report.f);
  out << line;
}

EvaluationReport parse_report(std::istream& in, const std::string& source) {
  EvaluationReport report;
  std::string line;
  std::size_t line_no = 0;
  const auto next = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw DataError(source + ": truncated report, missing " + what);
    }
    ++line_no;
    return split_tabs(line);
  };
  const auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };

  auto f = next("header");
  const std::string expected =
      std::string(kReportMagic) + '\t' + std::to_string(kReportVersion);
  if (line != expected) {
    throw DataError(source + ": expected report header '" + expected + "', found '" +
                    line + "'");
  }
  f = next("fingerprint");
  if (f.size() != 2 || f[0] != "fingerprint") throw DataError(where() + "expected fingerprint");
  if (f[1] != "-") report.fingerprint = f[1];
  f = next("seed");
  if (f.size() != 2 || f[0] != "seed") throw DataError(where() + "expected seed");
  try {
    if (f[1] != "-") report.seed = std::stoull(f[1]);
    f = next("column header");
    if (line != kHeader) throw DataError(where() + "unexpected column header");
    for (;;) {
      f = next("avg. row");
      if (f.size() != 8) throw DataError(where() + "expected 8 columns");
      if (f[0] == "avg.") {
        report.precision = std::stod(f[5]);
        report.recall = std::stod(f[6]);
        report.f = std::stod(f[7]);
        break;
      }
      TagScore r;
      r.tag = f[0];
      r.frequency = std::stoll(f[1]);
      r.n_classes = std::stoll(f[2]);
      r.correct = std::stoll(f[3]);
      r.incorrect = std::stoll(f[4]);
      r.precision = std::stod(f[5]);
      r.recall = std::stod(f[6]);
      r.f = std::stod(f[7]);
      report.rows.push_back(std::move(r));
    }
  } catch (const std::logic_error&) {
    throw DataError(where() + "malformed number");
  }
  return report;
}

}  // namespace posinduce
