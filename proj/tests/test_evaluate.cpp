#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "posinduce/common.hpp"
#include "posinduce/evaluate.hpp"

using namespace posinduce;

namespace {

std::vector<Token> gold_of(const std::vector<TagId>& tags) {
  std::vector<Token> out(tags.size());
  for (std::size_t i = 0; i < tags.size(); ++i) {
    out[i].form_id = 0;
    out[i].position = static_cast<std::int64_t>(i);
    out[i].gold_tag = tags[i];
  }
  return out;
}

InducedTagging tagging_of(const std::vector<std::int32_t>& clusters) {
  std::vector<TokenLabel> labels;
  for (const auto c : clusters) {
    labels.push_back(c < 0 ? TokenLabel{} : TokenLabel{TokenState::Assigned, c});
  }
  return InducedTagging(std::move(labels));
}

const std::vector<std::string> kNames{"A", "B", "C"};

}  // namespace

TEST_CASE("f measure") {
  CHECK(f_measure(0.66, 0.35) == doctest::Approx(0.4574).epsilon(1e-3));
  CHECK(f_measure(0.4, 0.4) == doctest::Approx(0.4));
  CHECK(f_measure(0.3, 0.9) == doctest::Approx(f_measure(0.9, 0.3)));
  CHECK(f_measure(0.0, 0.9) == 0.0);
  CHECK(f_measure(0.5, 1.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("a perfect tagging scores one") {
  const auto gold = gold_of({0, 1, 2, 0, 1, 2, 0});
  const auto tagging = tagging_of({5, 1, 0, 5, 1, 0, 5});
  const auto mapping = map_clusters_to_tags(tagging, gold, 3);
  CHECK(mapping.at(5) == 0);
  CHECK(mapping.at(1) == 1);
  CHECK(mapping.at(0) == 2);
  CHECK(mapping.at(3) == kNoTag);
  const auto report = score(tagging, gold, mapping, kNames);
  REQUIRE(report.rows.size() == 3);
  for (const auto& r : report.rows) {
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f == 1.0);
    CHECK(r.n_classes == 1);
  }
  CHECK(report.f == 1.0);
  CHECK(many_to_one_accuracy(tagging, gold, mapping) == 1.0);
}

TEST_CASE("hand-counted report") {
  // Cluster 0 -> A (3 A, 1 B); cluster 1 -> B (2 B, 1 C); one A unassigned.
  const auto gold = gold_of({0, 0, 0, 1, 1, 1, 2, 0});
  const auto tagging = tagging_of({0, 0, 0, 0, 1, 1, 1, -1});
  const auto mapping = map_clusters_to_tags(tagging, gold, 3);
  const auto report = score(tagging, gold, mapping, kNames);
  REQUIRE(report.rows.size() == 3);
  const auto& a = report.rows[0];
  CHECK(a.frequency == 4);
  CHECK(a.correct == 3);
  CHECK(a.incorrect == 1);
  CHECK(a.precision == doctest::Approx(0.75));
  CHECK(a.recall == doctest::Approx(0.75));
  const auto& b = report.rows[1];
  CHECK(b.precision == doctest::Approx(2.0 / 3.0));
  CHECK(b.recall == doctest::Approx(2.0 / 3.0));
  const auto& c = report.rows[2];
  CHECK(c.n_classes == 0);
  CHECK(c.f == 0.0);
  CHECK(report.precision == doctest::Approx((0.75 + 2.0 / 3.0) / 3.0));

  const auto excluded = score(tagging, gold, mapping, kNames, {.count_unassigned = false});
  CHECK(excluded.rows[0].frequency == 3);
  CHECK(excluded.rows[0].recall == 1.0);
  CHECK(many_to_one_accuracy(tagging, gold, mapping) == doctest::Approx(5.0 / 8.0));
}

TEST_CASE("skipped and excluded tokens are left out") {
  auto gold = gold_of({0, 1, 0, 1});
  gold[3].gold_tag = kExcludedTag;
  std::vector<TokenLabel> labels{{TokenState::Assigned, 0},
                                 {TokenState::Skipped, kUnassigned},
                                 {TokenState::Assigned, 0},
                                 {TokenState::Assigned, 0}};
  const InducedTagging tagging(labels);
  const auto mapping = map_clusters_to_tags(tagging, gold, 2);
  const auto report = score(tagging, gold, mapping, {"A", "B"});
  CHECK(report.rows[0].f == 1.0);
  CHECK(report.rows[1].frequency == 0);
  CHECK(many_to_one_accuracy(tagging, gold, mapping) == 1.0);
}

TEST_CASE("cluster relabeling does not change scores") {
  const auto gold = gold_of({0, 1, 1, 2, 0, 2, 1, 0, 2, 2});
  const auto a = tagging_of({0, 1, 2, 2, 0, 1, 1, 0, 2, 3});
  const auto b = tagging_of({3, 2, 0, 0, 3, 2, 2, 3, 0, 1});
  const auto ra = score(a, gold, map_clusters_to_tags(a, gold, 3), kNames);
  const auto rb = score(b, gold, map_clusters_to_tags(b, gold, 3), kNames);
  CHECK(ra == rb);
}

TEST_CASE("mapping ties go to the rarer tag, then the lower id") {
  // Cluster 0 holds one A and one B; A is more frequent overall.
  const auto gold = gold_of({0, 1, 0, 0});
  const auto tagging = tagging_of({0, 0, 1, 1});
  CHECK(map_clusters_to_tags(tagging, gold, 3).at(0) == 1);
  const auto even = gold_of({0, 1});
  CHECK(map_clusters_to_tags(tagging_of({0, 0}), even, 3).at(0) == 0);
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(map_clusters_to_tags(tagging_of({0}), gold_of({0, 1}), 2), DataError);
  CHECK_THROWS_AS(map_clusters_to_tags(tagging_of({-1, -1}), gold_of({0, 1}), 2), DataError);
  CHECK_THROWS_AS(parse_report_format("xml"), UsageError);
}

TEST_CASE("delimited reports round trip") {
  const auto gold = gold_of({0, 0, 0, 1, 1, 1, 2, 0});
  const auto tagging = tagging_of({0, 0, 0, 0, 1, 1, 1, -1});
  auto report = score(tagging, gold, map_clusters_to_tags(tagging, gold, 3), kNames);
  report.fingerprint = "0123456789abcdef";
  report.seed = 17;
  std::stringstream buf;
  render_report(report, ReportFormat::Delimited, buf);
  const auto again = parse_report(buf, "buf");
  CHECK(again.fingerprint == report.fingerprint);
  CHECK(again.seed == report.seed);
  REQUIRE(again.rows.size() == report.rows.size());
  const auto redone = rescore(again);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    CHECK(redone.rows[i].correct == report.rows[i].correct);
    CHECK(redone.rows[i].f == doctest::Approx(report.rows[i].f));
  }
  CHECK(redone.f == doctest::Approx(report.f));

  std::ostringstream text;
  render_report(report, ReportFormat::Text, text);
  CHECK(text.str().find("0123456789abcdef") != std::string::npos);
}

TEST_CASE("an empty report averages to zero") {
  const auto report = rescore(EvaluationReport{});
  CHECK(report.rows.empty());
  CHECK(report.f == 0.0);
}

TEST_CASE("count fixture rows rescore to the printed values") {
  std::ifstream in(std::string(POSINDUCE_TEST_DATA) + "/brown_type.tsv");
  REQUIRE(in);
  const auto report = rescore(parse_report(in, "brown_type.tsv"));
  const auto dt = std::find_if(report.rows.begin(), report.rows.end(),
                               [](const TagScore& r) { return r.tag == "DT"; });
  REQUIRE(dt != report.rows.end());
  CHECK(dt->precision == doctest::Approx(0.80).epsilon(0.005 / 0.80));
  CHECK(dt->recall == doctest::Approx(0.97).epsilon(0.005 / 0.97));
  CHECK(dt->f == doctest::Approx(0.87).epsilon(0.005 / 0.87));
}
