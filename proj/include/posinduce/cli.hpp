#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "posinduce/evaluate.hpp"
#include "posinduce/induce.hpp"

namespace posinduce::cli {

/// Where a corpus comes from and how to read it.
struct InputOptions {
  std::filesystem::path path;
  /// "text", "tagged", or "auto" (tagged when the first line has a tab).
  std::string format = "auto";
  std::optional<std::filesystem::path> tagmap;
  bool lowercase = false;
  std::int64_t min_tag_count = GoldOptions{}.min_tag_count;
};

struct VocabCommand {
  InputOptions input;
  std::optional<std::filesystem::path> out;
};

struct VectorsCommand {
  InputOptions input;
  InductionConfig config;
  /// "word" or "generalized".
  std::string mode = "word";
  /// "left", "right" or "both".
  std::string side = "both";
  std::filesystem::path out;
};

struct InduceCommand {
  InputOptions input;
  InductionConfig config;
  std::filesystem::path out;
};

struct TagCommand {
  std::filesystem::path bundle;
  InputOptions input;
  /// Overrides checked against the bundle's configuration.
  InductionConfig config;
  bool check_config = false;
  std::optional<std::filesystem::path> out;
};

struct EvalCommand {
  std::optional<std::filesystem::path> tagging;
  InputOptions gold;
  /// A delimited count fixture to rescore instead of a tagging.
  std::optional<std::filesystem::path> counts;
  /// Bundle whose fingerprint and seed label the report.
  std::optional<std::filesystem::path> bundle;
  ReportFormat format = ReportFormat::Text;
  bool exclude_unassigned = false;
  std::optional<std::filesystem::path> out;
};

struct NeighborsCommand {
  std::filesystem::path bundle;
  std::string word;
  Side side = Side::Left;
  std::size_t n = 10;
  ReportFormat format = ReportFormat::Text;
  std::optional<std::filesystem::path> out;
};

struct SynthCommand {
  std::size_t tokens = 120000;
  std::uint64_t seed = 1;
  bool punctuation = true;
  std::filesystem::path out;
  std::optional<std::filesystem::path> ambiguous_out;
};

/// The tag map named by `in.tagmap`, or the default map.
EvalTagMap load_tagmap(const InputOptions& in);
/// Reads `in.path`, resolving "auto" from the first non-blank line.
TokenStream read_input(const InputOptions& in, const EvalTagMap& map);

// Each command writes its primary output to `out` unless a file is named,
// and diagnostics to `log`.
void cmd_vocab(const VocabCommand& cmd, std::ostream& out);
void cmd_vectors(const VectorsCommand& cmd, std::ostream& log);
void cmd_induce(const InduceCommand& cmd, std::ostream& log);
void cmd_tag(const TagCommand& cmd, std::ostream& out);
void cmd_eval(const EvalCommand& cmd, std::ostream& out);
void cmd_neighbors(const NeighborsCommand& cmd, std::ostream& out);
void cmd_synth(const SynthCommand& cmd, std::ostream& log);

/// 1 usage, 2 data, 3 numeric.
int exit_code_for(const std::exception& e);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace posinduce::cli
