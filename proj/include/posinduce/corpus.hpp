#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace posinduce {

/// Index into an EvalTagMap's tag list, or one of the markers below.
using TagId = std::int32_t;
inline constexpr TagId kNoTag = -1;        // untagged corpus
inline constexpr TagId kExcludedTag = -2;  // present but not evaluated

/// Form id of a word absent from the vocabulary a corpus was encoded with.
inline constexpr std::int32_t kUnknownForm = -1;

struct Token {
  std::int32_t form_id = kUnknownForm;
  std::int64_t position = 0;
  TagId gold_tag = kNoTag;
  bool is_punct = false;
  /// A sentence or document break precedes this token.
  bool boundary_before = false;
};

/// Tokens plus the surface forms their ids refer to (first-occurrence order).
struct TokenStream {
  std::vector<std::string> forms;
  std::vector<Token> tokens;
  /// Per-token source tag as read from a tagged file; empty when untagged.
  std::vector<std::string> source_tags;
};

struct TokenizerOptions {
  /// Characters split off as standalone punctuation tokens.
  std::string punctuation = ".,;:!?\"'`()[]{}<>-/&*#%$@|~";
  /// Punctuation tokens after which a sentence boundary is placed.
  std::string sentence_final = ".!?";
  bool lowercase = false;
  /// Treat every newline, not only blank lines, as a boundary.
  bool line_is_sentence = false;
};

/// Splits raw UTF-8 text on whitespace and punctuation.
/// Throws DataError naming the byte offset of any invalid UTF-8 sequence.
TokenStream tokenize_stream(std::string_view text,
                            const TokenizerOptions& options = {});

class Vocabulary {
 public:
  Vocabulary() = default;
  /// ids follow the order of `words`, which also breaks frequency ties.
  Vocabulary(std::vector<std::string> words, std::vector<std::int64_t> freq);

  std::size_t size() const { return words_.size(); }
  const std::string& word(std::int32_t id) const { return words_.at(id); }
  std::optional<std::int32_t> find(std::string_view word) const;
  std::int64_t freq(std::int32_t id) const { return freq_.at(id); }
  /// 1-based descending-frequency rank.
  std::int32_t rank(std::int32_t id) const { return rank_.at(id); }
  std::int32_t id_at_rank(std::int32_t rank) const {
    return by_rank_.at(static_cast<std::size_t>(rank - 1));
  }
  /// Ids of the `count` top-ranked words.
  std::vector<std::int32_t> top(std::size_t count) const;
  std::int64_t total() const;

  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in, const std::string& source);

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && freq_ == other.freq_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::int64_t> freq_;
  std::vector<std::int32_t> rank_;
  std::vector<std::int32_t> by_rank_;
  std::unordered_map<std::string, std::int32_t> index_;
};

Vocabulary build_vocabulary(const TokenStream& stream);

/// Source tag -> evaluation tag table, loaded from `source<TAB>eval[<TAB>punct]`.
class EvalTagMap {
 public:
  static constexpr std::string_view kExcludedName = "EXCLUDED";

  /// Penn Treebank tags collapsed to the 16 evaluation classes.
  static EvalTagMap default_map();
  static EvalTagMap parse(std::istream& in, const std::string& source);
  static EvalTagMap load(const std::filesystem::path& path);

  /// Throws DataError for tags outside the map.
  TagId collapse(std::string_view source_tag) const;
  bool contains(std::string_view source_tag) const;
  bool is_punct_tag(std::string_view source_tag) const;

  /// Evaluation tags in ascending name order; TagId indexes this list.
  const std::vector<std::string>& tags() const { return tags_; }
  const std::string& tag_name(TagId id) const;
  std::optional<TagId> tag_id(std::string_view eval_name) const;

  void write(std::ostream& out) const;

 private:
  struct Entry {
    TagId tag = kExcludedTag;
    bool punct = false;
  };
  std::map<std::string, Entry, std::less<>> entries_;
  std::vector<std::string> tags_;
};

/// Evaluation tag of a single source tag.
TagId collapse_tag(std::string_view source_tag, const EvalTagMap& map);

struct GoldOptions {
  /// Evaluation tags with fewer gold tokens than this become EXCLUDED.
  std::int64_t min_tag_count = 100;
  bool lowercase = false;
  /// Character-class punctuation detection, unioned with the tag map's flags.
  std::string punctuation = TokenizerOptions{}.punctuation;
};

/// Reads `form<TAB>source-tag` lines; a blank line marks a sentence break.
TokenStream parse_gold(std::istream& in, const std::string& source,
                       const EvalTagMap& map, const GoldOptions& options = {});
TokenStream load_gold(const std::filesystem::path& path, const EvalTagMap& map,
                      const GoldOptions& options = {});

/// Writes a tagged stream back in vertical format.
void write_tagged(const TokenStream& stream, std::ostream& out);

/// A token stream together with its vocabulary; form ids agree.
struct Corpus {
  Vocabulary vocab;
  std::vector<Token> tokens;
  std::vector<std::string> source_tags;

  std::size_t size() const { return tokens.size(); }
  /// Neighbor positions honoring sentence boundaries.
  bool has_left(std::size_t pos) const {
    return pos > 0 && !tokens[pos].boundary_before;
  }
  bool has_right(std::size_t pos) const {
    return pos + 1 < tokens.size() && !tokens[pos + 1].boundary_before;
  }
};

Corpus make_corpus(TokenStream stream);

/// Re-encodes a stream against an existing vocabulary (unknown words get
/// kUnknownForm). Used to tag new text with a trained model.
Corpus encode_corpus(const TokenStream& stream, const Vocabulary& vocab);

/// Reads either plain text or vertical tagged format.
enum class InputFormat { Text, Tagged };
TokenStream read_corpus_file(const std::filesystem::path& path,
                             InputFormat format, const EvalTagMap& map,
                             const TokenizerOptions& tokenizer,
                             const GoldOptions& gold);

std::string read_file(const std::filesystem::path& path);

}  // namespace posinduce
