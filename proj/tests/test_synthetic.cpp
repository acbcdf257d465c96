#include <doctest.h>

#include <set>
#include <sstream>

#include "posinduce/common.hpp"
#include "posinduce/corpus.hpp"
#include "posinduce/synthetic.hpp"

using namespace posinduce;

namespace {

SyntheticOptions small(bool punctuation) {
  SyntheticOptions options;
  options.tokens = 20000;
  options.punctuation = punctuation;
  return options;
}

}  // namespace

TEST_CASE("generation is seeded") {
  const auto a = generate_synthetic(small(true));
  const auto b = generate_synthetic(small(true));
  CHECK(a.tagged == b.tagged);
  auto other = small(true);
  other.seed = 2;
  CHECK(generate_synthetic(other).tagged != a.tagged);
  CHECK(a.tokens >= 20000);
}

TEST_CASE("corpus has enough classes and ambiguity") {
  auto options = small(false);
  options.tokens = 100000;
  const auto corpus = generate_synthetic(options);
  std::istringstream in(corpus.tagged);
  const auto map = EvalTagMap::default_map();
  GoldOptions gold;
  gold.min_tag_count = 1;
  const auto stream = parse_gold(in, "synthetic", map, gold);
  std::set<TagId> classes;
  for (const auto& t : stream.tokens) {
    if (t.gold_tag >= 0) classes.insert(t.gold_tag);
  }
  CHECK(classes.size() >= 12);
  CHECK(static_cast<double>(corpus.ambiguous_forms.size()) >= 0.10 * static_cast<double>(corpus.types));
  CHECK(stream.tokens.size() == corpus.tokens);
}

TEST_CASE("punctuation can be switched off") {
  const auto with = generate_synthetic(small(true));
  const auto without = generate_synthetic(small(false));
  CHECK(with.tagged.find(".\t.") != std::string::npos);
  CHECK(without.tagged.find(".\t.") == std::string::npos);
  CHECK(without.tagged.find(",\t,") == std::string::npos);
}
