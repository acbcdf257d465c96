#include <doctest.h>

#include <sstream>

#include "posinduce/common.hpp"
#include "posinduce/corpus.hpp"

using namespace posinduce;

namespace {

std::vector<std::string> forms_of(const TokenStream& s) {
  std::vector<std::string> out;
  for (const auto& t : s.tokens) out.push_back(s.forms[static_cast<std::size_t>(t.form_id)]);
  return out;
}

TokenStream gold(const std::string& text, std::int64_t min_count = 0) {
  std::istringstream in(text);
  GoldOptions options;
  options.min_tag_count = min_count;
  return parse_gold(in, "test", EvalTagMap::default_map(), options);
}

}  // namespace

TEST_CASE("tokenizer splits punctuation and marks sentences") {
  const auto s = tokenize_stream("The dog ran. It sat, quietly...\n\nNew para");
  CHECK(forms_of(s) == std::vector<std::string>{"The", "dog", "ran", ".", "It", "sat",
                                                ",", "quietly", "...", "New", "para"});
  CHECK(s.tokens[3].is_punct);
  CHECK_FALSE(s.tokens[2].is_punct);
  CHECK(s.tokens[4].boundary_before);
  CHECK_FALSE(s.tokens[5].boundary_before);
  CHECK(s.tokens[9].boundary_before);
}

TEST_CASE("tokenizer lowercases on request") {
  TokenizerOptions options;
  options.lowercase = true;
  CHECK(forms_of(tokenize_stream("The THE the", options)) ==
        std::vector<std::string>{"the", "the", "the"});
}

TEST_CASE("invalid utf-8 names the offset") {
  try {
    tokenize_stream("ok \xff bad");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("offset 3") != std::string::npos);
  }
}

TEST_CASE("vocabulary ranks by frequency then first occurrence") {
  const auto v = build_vocabulary(tokenize_stream("b a c a b d"));
  CHECK(v.size() == 4);
  CHECK(v.rank(*v.find("b")) == 1);
  CHECK(v.rank(*v.find("a")) == 2);
  CHECK(v.rank(*v.find("c")) == 3);
  CHECK(v.rank(*v.find("d")) == 4);
  CHECK(v.total() == 6);
  CHECK(v.top(2) == std::vector<std::int32_t>{*v.find("b"), *v.find("a")});
  CHECK_FALSE(v.find("zzz"));
}

TEST_CASE("vocabulary round trip and header check") {
  const auto v = build_vocabulary(tokenize_stream("x y x z"));
  std::stringstream buf;
  v.write(buf);
  CHECK(Vocabulary::read(buf, "buf") == v);
  std::istringstream bad("#posinduce-vocabulary\t9\n");
  CHECK_THROWS_AS(Vocabulary::read(bad, "bad"), DataError);
}

TEST_CASE("default tag map collapses Penn tags") {
  const auto map = EvalTagMap::default_map();
  CHECK(map.tags().size() == 16);
  CHECK(map.tag_name(map.collapse("NNS")) == "N");
  CHECK(map.tag_name(map.collapse("PRP$")) == "DT");
  CHECK(map.tag_name(map.collapse("VBZ")) == "VBD");
  CHECK(map.tag_name(map.collapse("PRD")) == "VBN");
  CHECK(map.tag_name(map.collapse("RP")) == "RB");
  CHECK(map.tag_name(map.collapse("WP$")) == "WDT");
  CHECK(map.tag_name(map.collapse("VBG")) == "ING");
  CHECK(map.collapse(".") == kExcludedTag);
  CHECK(map.is_punct_tag(","));
  CHECK_FALSE(map.is_punct_tag("NN"));
  CHECK_THROWS_AS(map.collapse("XYZ"), DataError);
  CHECK(std::is_sorted(map.tags().begin(), map.tags().end()));
}

TEST_CASE("tag map file round trip") {
  const auto map = EvalTagMap::default_map();
  std::stringstream buf;
  map.write(buf);
  const auto again = EvalTagMap::parse(buf, "buf");
  CHECK(again.tags() == map.tags());
  CHECK(again.collapse("NNP") == map.collapse("NNP"));
  CHECK(again.is_punct_tag("."));
}

TEST_CASE("gold parsing keeps boundaries and tags") {
  const auto s = gold("The\tDT\ndog\tNN\n.\t.\n\nIt\tPRP\n");
  REQUIRE(s.tokens.size() == 4);
  const auto map = EvalTagMap::default_map();
  CHECK(map.tag_name(s.tokens[0].gold_tag) == "DT");
  CHECK(s.tokens[2].is_punct);
  CHECK(s.tokens[2].gold_tag == kExcludedTag);
  CHECK(s.tokens[3].boundary_before);
  CHECK(s.source_tags[1] == "NN");
  CHECK_THROWS_AS(gold("one two\n"), DataError);
  CHECK_THROWS_AS(gold("word\tNOPE\n"), DataError);
}

TEST_CASE("rare evaluation tags are excluded") {
  const auto s = gold("a\tDT\nb\tNN\nc\tNN\n", 2);
  CHECK(s.tokens[0].gold_tag == kExcludedTag);
  CHECK(s.tokens[1].gold_tag >= 0);
}

TEST_CASE("tagged output round trips") {
  const auto s = gold("The\tDT\ndog\tNN\n\nIt\tPRP\n");
  std::ostringstream out;
  write_tagged(s, out);
  CHECK(out.str() == "The\tDT\ndog\tNN\n\nIt\tPRP\n");
}

TEST_CASE("corpus neighbors respect boundaries") {
  const auto c = make_corpus(tokenize_stream("a b.\n\nc d"));
  REQUIRE(c.size() == 5);
  CHECK_FALSE(c.has_left(0));
  CHECK(c.has_right(1));
  CHECK_FALSE(c.has_right(2));
  CHECK_FALSE(c.has_left(3));
  CHECK_FALSE(c.has_right(4));
}

TEST_CASE("encoding against a vocabulary marks unknown words") {
  const auto train = make_corpus(tokenize_stream("a b a"));
  const auto c = encode_corpus(tokenize_stream("b q a"), train.vocab);
  CHECK(c.tokens[0].form_id == *train.vocab.find("b"));
  CHECK(c.tokens[1].form_id == kUnknownForm);
  CHECK(c.tokens[2].form_id == *train.vocab.find("a"));
}
