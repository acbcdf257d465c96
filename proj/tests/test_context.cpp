#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "posinduce/context.hpp"

using namespace posinduce;

namespace {

Corpus corpus_of(const std::string& text) { return make_corpus(tokenize_stream(text)); }

std::int32_t id(const Corpus& c, const char* w) { return *c.vocab.find(w); }

}  // namespace

TEST_CASE("triplets sum duplicates and drop zeros") {
  const auto m = SparseCountMatrix::from_triplets(2, 3, {{0, 1, 2}, {0, 1, 3}, {1, 2, 0}, {1, 0, 1}});
  CHECK(m.at(0, 1) == 5);
  CHECK(m.at(1, 2) == 0);
  CHECK(m.nnz() == 2);
  CHECK(m.total() == 6);
  CHECK(m.row_sum(1) == 1);
  CHECK_THROWS_AS(SparseCountMatrix::from_triplets(1, 1, {{0, 3, 1}}), DataError);
  CHECK_THROWS_AS(SparseCountMatrix::from_triplets(1, 1, {{0, 0, -1}}), DataError);
}

TEST_CASE("sparse matrix text round trip") {
  auto m = SparseCountMatrix::from_dense({{1, 0, 2}, {0, 0, 0}, {0, 7, 0}});
  m.side = Side::Right;
  m.col_labels = {4, 5, 6};
  std::stringstream buf;
  m.write(buf);
  const auto again = SparseCountMatrix::read(buf, "buf");
  CHECK(again == m);
  CHECK(again.side == Side::Right);
  CHECK(again.to_dense()(2, 1) == 7.0);
}

TEST_CASE("left and right vectors count adjacent feature words") {
  // a b a c .  a b
  const auto c = corpus_of("a b a c.\n\na b");
  const auto features = ContextFeatureSet::top_words(c.vocab, c.vocab.size());
  const auto left = count_context_vectors(c, features, Side::Left);
  const auto right = count_context_vectors(c, features, Side::Right);
  const auto col = [&](const char* w) {
    const auto it = std::find(features.feature_ids.begin(), features.feature_ids.end(), id(c, w));
    return static_cast<std::int32_t>(it - features.feature_ids.begin());
  };
  CHECK(left.at(id(c, "b"), col("a")) == 2);
  CHECK(left.at(id(c, "a"), col("b")) == 1);
  CHECK(right.at(id(c, "a"), col("b")) == 2);
  CHECK(right.at(id(c, "a"), col("c")) == 1);
  CHECK(right.at(id(c, "c"), col(".")) == 1);
  // No counts across the sentence break.
  CHECK(right.at(id(c, "."), col("a")) == 0);
  CHECK(left.total() == right.total());
  CHECK(left.total() == 5);
}

TEST_CASE("only the top features become columns") {
  const auto c = corpus_of("x x x y y z");
  const auto features = ContextFeatureSet::top_words(c.vocab, 1);
  const auto left = count_context_vectors(c, features, Side::Left);
  CHECK(left.n_cols() == 1);
  CHECK(left.at(id(c, "y"), 0) == 1);
  CHECK(left.at(id(c, "z"), 0) == 0);
  CHECK(left.at(id(c, "x"), 0) == 2);
}

TEST_CASE("generalized vectors need opposite-side classes") {
  const auto c = corpus_of("a b c a b c a b d");
  NeighborClassModel classes;
  classes.source_side = Side::Left;
  classes.classes = 2;
  classes.word_class = std::vector<std::int32_t>(c.vocab.size(), 0);
  classes.word_class[static_cast<std::size_t>(id(c, "b"))] = 1;
  CHECK_THROWS_AS(generalized_context_vectors(c, classes, Side::Left), UsageError);
  const auto right = generalized_context_vectors(c, classes, Side::Right);
  CHECK(right.kind == FeatureKind::Class);
  CHECK(right.at(id(c, "a"), 1) == 3);
  CHECK(right.at(id(c, "b"), 0) == 3);
  // Row sums equal the number of right neighbors.
  for (std::int32_t w = 0; w < static_cast<std::int32_t>(c.vocab.size()); ++w) {
    std::int64_t neighbors = 0;
    for (std::size_t p = 0; p < c.size(); ++p) {
      if (c.tokens[p].form_id == w && c.has_right(p)) ++neighbors;
    }
    CHECK(right.row_sum(w) == neighbors);
  }
}

TEST_CASE("neighbor classes cover every word") {
  const auto c = corpus_of("the cat sat . the dog ran . a cat ran . a dog sat . lone");
  const auto features = ContextFeatureSet::top_words(c.vocab, 4);
  const auto left = count_context_vectors(c, features, Side::Left);
  NeighborClassOptions options;
  options.dims = 3;
  options.classes = 3;
  const auto model = build_neighbor_classes(left, options);
  CHECK(model.source_side == Side::Left);
  REQUIRE(model.word_class.size() == c.vocab.size());
  for (auto k : model.word_class) {
    CHECK(k >= 0);
    CHECK(k < 3);
  }
  CHECK(model == build_neighbor_classes(left, options));
}
