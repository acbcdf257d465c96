#include "posinduce/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "posinduce/common.hpp"

namespace posinduce {
namespace {

constexpr std::string_view kVocabularyMagic = "#posinduce-vocabulary";
constexpr int kVocabularyVersion = 1;

// Penn Treebank tags collapsed to the evaluation classes. ADN and PRD must
// already be marked in the input; plain JJ is deliberately absent.
constexpr std::string_view kDefaultTagMap = R"(# source	eval	[punct]
# A line starting with '#' is a comment unless '#' is followed by a TAB.
ADN	ADN
$	ADN
CC	CC
CD	CD
DT	DT
PDT	DT
PRP$	DT
IN	IN
VBG	ING
MD	MD
NN	N
NNS	N
NNP	N
NNPS	N
POS	POS
PRP	PRP
RB	RB
RP	RB
RBR	RB
RBS	RB
TO	TO
VB	VB
VBD	VBD
VBZ	VBD
VBP	VBD
VBN	VBN
PRD	VBN
WP	WDT
WP$	WDT
WRB	WDT
WDT	WDT
.	EXCLUDED	punct
,	EXCLUDED	punct
:	EXCLUDED	punct
``	EXCLUDED	punct
''	EXCLUDED	punct
(	EXCLUDED	punct
)	EXCLUDED	punct
-LRB-	EXCLUDED	punct
-RRB-	EXCLUDED	punct
HYPH	EXCLUDED	punct
NFP	EXCLUDED	punct
#	EXCLUDED
SYM	EXCLUDED
UH	EXCLUDED
FW	EXCLUDED
LS	EXCLUDED
EX	EXCLUDED
)";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\v' || c == '\f' || c == '\r';
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Returns the byte offset of the first invalid sequence, or npos.
std::size_t find_invalid_utf8(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > n) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return i;
    }
    i += len;
  }
  return std::string_view::npos;
}

class StreamBuilder {
 public:
  explicit StreamBuilder(TokenStream& stream) : stream_(stream) {}

  void add(std::string_view form, bool is_punct, bool boundary) {
    auto [it, inserted] = ids_.try_emplace(std::string(form),
                                           static_cast<std::int32_t>(ids_.size()));
    if (inserted) stream_.forms.emplace_back(form);
    Token token;
    token.form_id = it->second;
    token.position = static_cast<std::int64_t>(stream_.tokens.size());
    token.is_punct = is_punct;
    token.boundary_before = boundary && !stream_.tokens.empty();
    stream_.tokens.push_back(token);
  }

 private:
  TokenStream& stream_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

}  // namespace

TokenStream tokenize_stream(std::string_view text,
                            const TokenizerOptions& options) {
  if (const std::size_t bad = find_invalid_utf8(text);
      bad != std::string_view::npos) {
    throw DataError("invalid UTF-8 at byte offset " + std::to_string(bad));
  }
  TokenStream stream;
  StreamBuilder builder(stream);
  const auto is_punct_char = [&](char c) {
    return options.punctuation.find(c) != std::string::npos;
  };

  bool pending_boundary = false;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    const std::string_view line = text.substr(line_start, line_end - line_start);

    if (std::all_of(line.begin(), line.end(), is_space)) {
      pending_boundary = true;
    } else {
      if (options.line_is_sentence) pending_boundary = true;
      std::size_t i = 0;
      while (i < line.size()) {
        if (is_space(line[i])) {
          ++i;
          continue;
        }
        std::size_t j = i;
        if (is_punct_char(line[i])) {
          // Runs of one repeated mark ("...", "--") stay together.
          while (j < line.size() && line[j] == line[i]) ++j;
          const std::string_view form = line.substr(i, j - i);
          builder.add(form, true, pending_boundary);
          pending_boundary =
              options.sentence_final.find(form.front()) != std::string::npos;
        } else {
          while (j < line.size() && !is_space(line[j]) &&
                 !is_punct_char(line[j])) {
            ++j;
          }
          const std::string_view form = line.substr(i, j - i);
          if (options.lowercase) {
            builder.add(ascii_lower(form), false, pending_boundary);
          } else {
            builder.add(form, false, pending_boundary);
          }
          pending_boundary = false;
        }
        i = j;
      }
    }
    line_start = line_end + 1;
  }
  return stream;
}

Vocabulary::Vocabulary(std::vector<std::string> words,
                       std::vector<std::int64_t> freq)
    : words_(std::move(words)), freq_(std::move(freq)) {
  if (words_.size() != freq_.size()) {
    throw std::invalid_argument("vocabulary words/freq size mismatch");
  }
  const std::size_t n = words_.size();
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(words_[i], static_cast<std::int32_t>(i)).second) {
      throw DataError("duplicate vocabulary entry '" + words_[i] + "'");
    }
  }
  by_rank_.resize(n);
  std::iota(by_rank_.begin(), by_rank_.end(), 0);
  std::stable_sort(by_rank_.begin(), by_rank_.end(),
                   [&](std::int32_t a, std::int32_t b) {
                     return freq_[a] > freq_[b];
                   });
  rank_.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    rank_[by_rank_[r]] = static_cast<std::int32_t>(r + 1);
  }
}

std::optional<std::int32_t> Vocabulary::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::int32_t> Vocabulary::top(std::size_t count) const {
  count = std::min(count, by_rank_.size());
  return {by_rank_.begin(), by_rank_.begin() + static_cast<std::ptrdiff_t>(count)};
}

std::int64_t Vocabulary::total() const {
  return std::accumulate(freq_.begin(), freq_.end(), std::int64_t{0});
}

void Vocabulary::write(std::ostream& out) const {
  out << kVocabularyMagic << '\t' << kVocabularyVersion << '\n';
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i] << '\t' << i << '\t' << freq_[i] << '\n';
  }
}

Vocabulary Vocabulary::read(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(source + ": empty vocabulary file");
  }
  const std::string expected =
      std::string(kVocabularyMagic) + '\t' + std::to_string(kVocabularyVersion);
  if (line != expected) {
    throw DataError(source + ": expected vocabulary header '" + expected +
                    "', found '" + line + "'");
  }
  std::vector<std::string> words;
  std::vector<std::int64_t> freq;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw DataError(source + ":" + std::to_string(line_no) +
                      ": expected word<TAB>id<TAB>freq");
    }
    try {
      const auto id = std::stoll(line.substr(t1 + 1, t2 - t1 - 1));
      if (id != static_cast<long long>(words.size())) {
        throw DataError(source + ":" + std::to_string(line_no) +
                        ": ids must be dense and ascending");
      }
      freq.push_back(std::stoll(line.substr(t2 + 1)));
    } catch (const std::logic_error&) {
      throw DataError(source + ":" + std::to_string(line_no) +
                      ": malformed number");
    }
    words.push_back(line.substr(0, t1));
  }
  return Vocabulary(std::move(words), std::move(freq));
}

Vocabulary build_vocabulary(const TokenStream& stream) {
  std::vector<std::int64_t> freq(stream.forms.size(), 0);
  for (const Token& t : stream.tokens) ++freq.at(static_cast<std::size_t>(t.form_id));
  return Vocabulary(stream.forms, std::move(freq));
}

EvalTagMap EvalTagMap::default_map() {
  std::istringstream in{std::string(kDefaultTagMap)};
  return parse(in, "<default tag map>");
}

EvalTagMap EvalTagMap::parse(std::istream& in, const std::string& source) {
  struct Raw {
    std::string eval;
    bool punct;
  };
  std::map<std::string, Raw, std::less<>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#' && (line.size() == 1 || line[1] != '\t')) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const auto where = source + ":" + std::to_string(line_no);
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() ||
        fields[1].empty()) {
      throw DataError(where + ": expected source<TAB>eval[<TAB>punct]");
    }
    if (fields.size() == 3 && fields[2] != "punct") {
      throw DataError(where + ": third column must be 'punct'");
    }
    if (!raw.emplace(fields[0], Raw{fields[1], fields.size() == 3}).second) {
      throw DataError(where + ": duplicate source tag '" + fields[0] + "'");
    }
  }

  EvalTagMap map;
  for (const auto& [src, r] : raw) {
    if (r.eval != kExcludedName) map.tags_.push_back(r.eval);
  }
  std::sort(map.tags_.begin(), map.tags_.end());
  map.tags_.erase(std::unique(map.tags_.begin(), map.tags_.end()),
                  map.tags_.end());
  for (const auto& [src, r] : raw) {
    Entry e;
    e.punct = r.punct;
    if (r.eval != kExcludedName) {
      e.tag = static_cast<TagId>(
          std::lower_bound(map.tags_.begin(), map.tags_.end(), r.eval) -
          map.tags_.begin());
    }
    map.entries_.emplace(src, e);
  }
  return map;
}

EvalTagMap EvalTagMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open tag map");
  return parse(in, path.string());
}

TagId EvalTagMap::collapse(std::string_view source_tag) const {
  const auto it = entries_.find(source_tag);
  if (it == entries_.end()) {
    throw DataError("source tag '" + std::string(source_tag) +
                    "' is not in the tag map");
  }
  return it->second.tag;
}

bool EvalTagMap::contains(std::string_view source_tag) const {
  return entries_.find(source_tag) != entries_.end();
}

bool EvalTagMap::is_punct_tag(std::string_view source_tag) const {
  const auto it = entries_.find(source_tag);
  return it != entries_.end() && it->second.punct;
}

const std::string& EvalTagMap::tag_name(TagId id) const {
  static const std::string kExcluded(kExcludedName);
  static const std::string kNone = "-";
  if (id == kExcludedTag) return kExcluded;
  if (id == kNoTag) return kNone;
  return tags_.at(static_cast<std::size_t>(id));
}

std::optional<TagId> EvalTagMap::tag_id(std::string_view eval_name) const {
  const auto it = std::lower_bound(tags_.begin(), tags_.end(), eval_name);
  if (it == tags_.end() || *it != eval_name) return std::nullopt;
  return static_cast<TagId>(it - tags_.begin());
}

void EvalTagMap::write(std::ostream& out) const {
  for (const auto& [src, e] : entries_) {
    out << src << '\t' << tag_name(e.tag);
    if (e.punct) out << "\tpunct";
    out << '\n';
  }
}

TagId collapse_tag(std::string_view source_tag, const EvalTagMap& map) {
  return map.collapse(source_tag);
}

TokenStream parse_gold(std::istream& in, const std::string& source,
                       const EvalTagMap& map, const GoldOptions& options) {
  TokenStream stream;
  StreamBuilder builder(stream);
  bool pending_boundary = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      pending_boundary = true;
      continue;
    }
    const auto where = source + ":" + std::to_string(line_no);
    if (const std::size_t bad = find_invalid_utf8(line);
        bad != std::string_view::npos) {
      throw DataError(where + ": invalid UTF-8 at column " +
                      std::to_string(bad + 1));
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw DataError(where + ": expected form<TAB>tag");
    }
    std::string form = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    TagId gold;
    try {
      gold = map.collapse(tag);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    const bool punct_chars =
        std::all_of(form.begin(), form.end(), [&](char c) {
          return options.punctuation.find(c) != std::string::npos;
        });
    if (options.lowercase) form = ascii_lower(form);
    builder.add(form, map.is_punct_tag(tag) || punct_chars, pending_boundary);
    stream.tokens.back().gold_tag = gold;
    stream.source_tags.push_back(std::move(tag));
    pending_boundary = false;
  }

  std::vector<std::int64_t> counts(map.tags().size(), 0);
  for (const Token& t : stream.tokens) {
    if (t.gold_tag >= 0) ++counts[static_cast<std::size_t>(t.gold_tag)];
  }
  for (Token& t : stream.tokens) {
    if (t.gold_tag >= 0 &&
        counts[static_cast<std::size_t>(t.gold_tag)] < options.min_tag_count) {
      t.gold_tag = kExcludedTag;
    }
  }
  return stream;
}

TokenStream load_gold(const std::filesystem::path& path, const EvalTagMap& map,
                      const GoldOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open tagged corpus");
  return parse_gold(in, path.string(), map, options);
}

void write_tagged(const TokenStream& stream, std::ostream& out) {
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    const Token& t = stream.tokens[i];
    if (i > 0 && t.boundary_before) out << '\n';
    out << stream.forms.at(static_cast<std::size_t>(t.form_id)) << '\t'
        << stream.source_tags.at(i) << '\n';
  }
}

Corpus make_corpus(TokenStream stream) {
  Corpus corpus;
  corpus.vocab = build_vocabulary(stream);
  corpus.tokens = std::move(stream.tokens);
  corpus.source_tags = std::move(stream.source_tags);
  return corpus;
}

Corpus encode_corpus(const TokenStream& stream, const Vocabulary& vocab) {
  Corpus corpus;
  corpus.vocab = vocab;
  corpus.tokens = stream.tokens;
  corpus.source_tags = stream.source_tags;
  std::vector<std::int32_t> remap(stream.forms.size());
  for (std::size_t i = 0; i < stream.forms.size(); ++i) {
    remap[i] = vocab.find(stream.forms[i]).value_or(kUnknownForm);
  }
  for (Token& t : corpus.tokens) {
    t.form_id = remap[static_cast<std::size_t>(t.form_id)];
  }
  return corpus;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

TokenStream read_corpus_file(const std::filesystem::path& path,
                             InputFormat format, const EvalTagMap& map,
                             const TokenizerOptions& tokenizer,
                             const GoldOptions& gold) {
  if (format == InputFormat::Tagged) return load_gold(path, map, gold);
  const std::string text = read_file(path);
  try {
    return tokenize_stream(text, tokenizer);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace posinduce
