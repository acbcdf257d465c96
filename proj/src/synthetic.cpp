#include "posinduce/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

#include "posinduce/common.hpp"
#include "posinduce/corpus.hpp"

namespace posinduce {
namespace {

class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::vector<std::string> words, double zipf) : words_(std::move(words)) {
    double total = 0.0;
    for (std::size_t r = 0; r < words_.size(); ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), zipf);
      cdf_.push_back(total);
    }
    for (double& c : cdf_) c /= total;
  }

  const std::string& draw(Rng& rng) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), rng.uniform01());
    const auto i = std::min(static_cast<std::size_t>(it - cdf_.begin()), words_.size() - 1);
    return words_[i];
  }

 private:
  std::vector<std::string> words_;
  std::vector<double> cdf_;
};

class WordMaker {
 public:
  explicit WordMaker(Rng& rng) : rng_(rng) {}

  void reserve(std::string_view word) { used_.emplace(word); }

  /// A fresh pseudo-word; it and all its suffixed forms are unused.
  std::string make(int syllables, const std::vector<std::string>& suffixes) {
    static constexpr std::string_view kOnsets = "bdfgklmnprstvz";
    static constexpr std::string_view kVowels = "aeiou";
    for (int attempt = 1;; ++attempt) {
      // Lengthen words once short forms are nearly exhausted.
      if (attempt % 200 == 0) ++syllables;
      std::string w;
      for (int s = 0; s < syllables; ++s) {
        w += kOnsets[rng_.uniform_index(kOnsets.size())];
        w += kVowels[rng_.uniform_index(kVowels.size())];
      }
      w += kOnsets[rng_.uniform_index(kOnsets.size())];
      bool clash = used_.count(w) > 0;
      for (const auto& s : suffixes) clash = clash || used_.count(w + s) > 0;
      if (clash) continue;
      used_.insert(w);
      for (const auto& s : suffixes) used_.insert(w + s);
      return w;
    }
  }

 private:
  Rng& rng_;
  std::set<std::string> used_;
};

using Sentence = std::vector<std::pair<std::string, std::string>>;

struct Template {
  double weight;
  std::string_view slots;
};

// Slot symbols are Penn tags plus: PRPO object pronoun, HAS perfect
// auxiliary, BE copula, ",?" optional comma.
constexpr Template kTemplates[] = {
    {3, "DT ADN NN VBD DT NN ."},
    {3, "PRP MD VB DT NNS IN DT NN ."},
    {2, "NNP HAS VBN DT ADN NN ."},
    {2, "DT NN BE PRD ."},
    {1, "DT NNS BE RB PRD IN NNP ."},
    {2, "PRP BE VBG DT NN IN NNP ."},
    {2, "DT NNS VBD TO VB PRPO ."},
    {2, "DT NN ,? WDT VBD DT NN ,? VBZ RB ."},
    {2, "CD NNS VBD IN DT NN ,? CC PRP VBD PRPO ."},
    {1, "DT NN POS NN VBD DT ADN NN ."},
    {2, "PRP VBD RP DT NN ."},
    {2, "IN DT NN , PRP VBD NNS ."},
    {1, "DT ADN NNS BE VBN IN DT NN ."},
    {1, "NNP VBZ DT NN IN DT ADN NN ."},
    {1, "RB , NNP MD VB NNP ."},
};

constexpr std::string_view kDeterminers[] = {"the", "a", "this", "every", "some", "his"};
constexpr std::string_view kPronouns[] = {"he", "she", "they", "we", "it"};
constexpr std::string_view kObjectPronouns[] = {"him", "her", "them", "us"};
constexpr std::string_view kPrepositions[] = {"of", "in", "with", "from", "at", "for"};
constexpr std::string_view kParticles[] = {"out", "off", "away"};
constexpr std::string_view kConjunctions[] = {"and", "or", "but"};
constexpr std::string_view kModals[] = {"will", "can", "must", "should", "may"};
constexpr std::string_view kNumbers[] = {"two", "three", "four", "five", "ten", "forty"};
constexpr std::string_view kWh[] = {"which", "who"};

// Closed-class words with two functions, realized equally often in both.
struct SharedClosed {
  const char* a;
  const char* b;
  std::vector<std::string> words;
};
const SharedClosed kSharedClosed[] = {
    {"DT", "WDT", {"that"}},
    {"IN", "TO", {"to"}},
    {"IN", "RP", {"up", "over", "on"}},
};

class Grammar {
 public:
  Grammar(const SyntheticOptions& options, Rng& rng) : options_(options), rng_(rng) {
    WordMaker maker(rng);
    const auto reserve_all = [&](const auto& words) {
      for (const auto& w : words) maker.reserve(w);
    };
    reserve_all(kDeterminers);
    reserve_all(kPronouns);
    reserve_all(kObjectPronouns);
    reserve_all(kPrepositions);
    reserve_all(kParticles);
    reserve_all(kConjunctions);
    reserve_all(kModals);
    reserve_all(kNumbers);
    reserve_all(kWh);
    for (const auto& sc : kSharedClosed) reserve_all(sc.words);
    for (const auto w : {"'s", "is", "was", "has", "had", ".", ","}) maker.reserve(w);

    const auto closed = [&](const char* slot, const auto& words) {
      auto& list = closed_[slot];
      for (const auto& w : words) list.emplace_back(w);
      for (int i = 0; i < options.closed_extra; ++i) list.push_back(maker.make(1, {}));
    };
    closed("DT", kDeterminers);
    closed("PRP", kPronouns);
    closed("PRPO", kObjectPronouns);
    closed("IN", kPrepositions);
    closed("RP", kParticles);
    closed("CC", kConjunctions);
    closed("MD", kModals);
    closed("CD", kNumbers);
    closed("WDT", kWh);

    double total = 0.0;
    std::map<std::string, double> slot_rate;
    for (const auto& t : kTemplates) total += t.weight;
    for (const auto& t : kTemplates) {
      template_cdf_.push_back((template_cdf_.empty() ? 0.0 : template_cdf_.back()) +
                              t.weight / total);
      std::istringstream slots{std::string(t.slots)};
      std::string slot;
      while (slots >> slot) slot_rate[slot] += t.weight / total;
    }
    // Shared words fill ambiguous_share of the rarer slot and the same
    // number of tokens in the other, so both uses are equally frequent.
    const auto balance = [&](const char* a, const char* b) {
      const double m = std::min(slot_rate[a], slot_rate[b]);
      shared_rate_[a] = options.ambiguous_share * m / slot_rate[a];
      shared_rate_[b] = options.ambiguous_share * m / slot_rate[b];
    };
    balance("NN", "VB");
    balance("VBD", "VBN");
    balance("ADN", "PRD");
    for (const auto& sc : kSharedClosed) {
      // TO has no other filler, so "to" takes all of it.
      const double share = std::string_view(sc.b) == "TO" ? 1.0 : options.ambiguous_share;
      const double m = std::min(slot_rate[sc.a], slot_rate[sc.b]);
      closed_shared_[sc.a].emplace_back(share * m / slot_rate[sc.a], &sc.words);
      closed_shared_[sc.b].emplace_back(share * m / slot_rate[sc.b], &sc.words);
    }

    const auto lexicon = [&](int size, int syllables, const std::vector<std::string>& suffixes,
                             const std::string& ending = "") {
      std::vector<std::string> words;
      for (int i = 0; i < std::max(size, 1); ++i) {
        words.push_back(maker.make(syllables, suffixes) + ending);
      }
      return Lexicon(std::move(words), options.zipf);
    };
    verbs_ = lexicon(options.verbs, 1, {"s", "ed", "ing"});
    stems_ = lexicon(static_cast<int>(options.verbs * options.noun_verb_share), 1, {});
    nouns_ = lexicon(options.nouns, 2, {"s"});
    pasts_ = lexicon(options.verbs / 2, 1, {"ot"}, "ot");
    participles_ = lexicon(options.verbs / 2, 1, {"en"}, "en");
    adjectives_ = lexicon(options.adjectives, 2, {});
    adnominals_ = lexicon(options.adjectives / 2, 2, {"ic"}, "ic");
    predicatives_ = lexicon(options.adjectives / 2, 2, {"ish"}, "ish");
    adverbs_ = lexicon(options.adverbs, 1, {"ly"}, "ly");
    std::vector<std::string> names;
    for (int i = 0; i < options.names; ++i) {
      std::string n = maker.make(2, {});
      n[0] = static_cast<char>(n[0] - 'a' + 'A');
      names.push_back(std::move(n));
    }
    names_ = Lexicon(std::move(names), options.zipf);
  }

  Sentence sentence() {
    const auto it = std::upper_bound(template_cdf_.begin(), template_cdf_.end(),
                                     rng_.uniform01());
    const auto t = std::min(static_cast<std::size_t>(it - template_cdf_.begin()),
                            std::size(kTemplates) - 1);
    Sentence out;
    std::istringstream slots{std::string(kTemplates[t].slots)};
    std::string slot;
    while (slots >> slot) {
      if (!options_.punctuation && (slot == ",?" || slot == "," || slot == ".")) continue;
      if (slot == ",?") {
        if (chance(options_.comma_rate)) out.emplace_back(",", ",");
        continue;
      }
      out.push_back(fill(slot));
    }
    return out;
  }

 private:
  const std::string& pick(const std::vector<std::string>& words) {
    return words[rng_.uniform_index(words.size())];
  }

  bool chance(double p) { return rng_.uniform01() < p; }
  bool shared(const std::string& slot) { return chance(shared_rate_.at(slot)); }

  std::pair<std::string, std::string> fill(const std::string& slot) {
    const bool past = chance(0.5);
    if (const auto it = closed_shared_.find(slot); it != closed_shared_.end()) {
      double u = rng_.uniform01();
      for (const auto& [rate, words] : it->second) {
        if (u < rate) return {pick(*words), slot};
        u -= rate;
      }
    }
    if (slot == "PRPO") return {pick(closed_.at(slot)), "PRP"};
    if (const auto it = closed_.find(slot); it != closed_.end()) return {pick(it->second), slot};
    if (slot == "POS") return {"'s", slot};
    if (slot == "HAS") return {past ? "had" : "has", past ? "VBD" : "VBZ"};
    if (slot == "BE") return {past ? "was" : "is", past ? "VBD" : "VBZ"};
    if (slot == "NN") return {shared("NN") ? stems_.draw(rng_) : nouns_.draw(rng_), slot};
    if (slot == "NNS") return {nouns_.draw(rng_) + "s", slot};
    if (slot == "NNP") return {names_.draw(rng_), slot};
    if (slot == "ADN") {
      return {shared(slot) ? adjectives_.draw(rng_) : adnominals_.draw(rng_), slot};
    }
    if (slot == "PRD") {
      return {shared(slot) ? adjectives_.draw(rng_) : predicatives_.draw(rng_), slot};
    }
    if (slot == "RB") return {adverbs_.draw(rng_), slot};
    if (slot == "VB") return {shared(slot) ? stems_.draw(rng_) : verbs_.draw(rng_), slot};
    if (slot == "VBD") {
      return {shared(slot) ? verbs_.draw(rng_) + "ed" : pasts_.draw(rng_), slot};
    }
    if (slot == "VBN") {
      return {shared(slot) ? verbs_.draw(rng_) + "ed" : participles_.draw(rng_), slot};
    }
    if (slot == "VBZ") return {verbs_.draw(rng_) + "s", slot};
    if (slot == "VBG") return {verbs_.draw(rng_) + "ing", slot};
    return {slot, slot};
  }

  const SyntheticOptions& options_;
  Rng& rng_;
  Lexicon verbs_, stems_, nouns_, pasts_, participles_;
  Lexicon adjectives_, adnominals_, predicatives_, adverbs_, names_;
  std::map<std::string, double> shared_rate_;
  std::map<std::string, std::vector<std::pair<double, const std::vector<std::string>*>>>
      closed_shared_;
  std::map<std::string, std::vector<std::string>> closed_;
  std::vector<double> template_cdf_;
};

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticOptions& options) {
  if (options.nouns < 1 || options.verbs < 1 || options.adjectives < 1 ||
      options.adverbs < 1 || options.names < 1) {
    throw UsageError("synthetic lexicon sizes must be positive");
  }
  Rng rng(derive_seed(options.seed, "synthetic"));
  Grammar grammar(options, rng);
  const EvalTagMap map = EvalTagMap::default_map();

  SyntheticCorpus out;
  std::map<std::string, std::set<TagId>> uses;
  while (out.tokens < options.tokens) {
    for (const auto& [form, tag] : grammar.sentence()) {
      out.tagged += form;
      out.tagged += '\t';
      out.tagged += tag;
      out.tagged += '\n';
      ++out.tokens;
      const TagId t = map.collapse(tag);
      auto& set = uses[form];
      if (t >= 0) set.insert(t);
    }
    out.tagged += '\n';
  }
  out.types = uses.size();
  for (const auto& [form, tags] : uses) {
    if (tags.size() >= 2) out.ambiguous_forms.push_back(form);
  }
  return out;
}

}  // namespace posinduce
