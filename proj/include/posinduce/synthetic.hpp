#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace posinduce {

/// Planted-class corpus from a seeded template grammar over Penn tags.
///
/// Sentences are weighted fixed tag sequences whose slots are filled from
/// Zipfian pseudo-word lexicons. Ambiguity is structural: regular past
/// forms serve as VBD and VBN, adjectives are both attributive (ADN) and
/// predicative (PRD), a lexicon of stems serves as both nouns and verbs,
/// particles double as prepositions, and "to" / "that" each have two functions. Each
/// shared word is used about equally often in both of its classes.
/// Optional commas are injected at clause boundaries. With punctuation off,
/// sentences are bare tag sequences.
struct SyntheticOptions {
  std::size_t tokens = 120000;
  std::uint64_t seed = 1;
  int nouns = 500;
  int verbs = 220;
  int adjectives = 160;
  int adverbs = 50;
  int names = 150;
  /// Pseudo-words added to each closed class.
  int closed_extra = 0;
  /// Size of the shared noun/verb stem lexicon relative to `verbs`.
  double noun_verb_share = 0.35;
  /// Share of the rarer slot of each ambiguous pair (NN/VB, VBD/VBN,
  /// ADN/PRD) filled from the pair's shared lexicon; the other slot gets the
  /// same number of shared tokens.
  double ambiguous_share = 0.6;
  /// Emit sentence-final periods and commas.
  bool punctuation = true;
  /// Chance that an optional comma is realized.
  double comma_rate = 0.5;
  /// Zipf exponent for open-class lexicons.
  double zipf = 1.0;
};

struct SyntheticCorpus {
  /// Vertical `form<TAB>tag` lines, blank line between sentences.
  std::string tagged;
  /// Forms realized with two or more evaluation tags, sorted.
  std::vector<std::string> ambiguous_forms;
  std::size_t types = 0;
  std::size_t tokens = 0;
};

SyntheticCorpus generate_synthetic(const SyntheticOptions& options = {});

}  // namespace posinduce
