#include "posinduce/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <new>
#include <sstream>

#include "posinduce/container.hpp"
#include "posinduce/synthetic.hpp"

namespace posinduce::cli {
namespace {

namespace fs = std::filesystem;

constexpr int kManifestVersion = 1;

/// Writes to `path` when given, else to `fallback`.
template <typename Fn>
void emit(const std::optional<fs::path>& path, std::ostream& fallback, Fn&& write) {
  if (!path) {
    write(fallback);
    return;
  }
  std::ofstream file(*path, std::ios::binary);
  if (!file) throw DataError(path->string() + ": cannot open for writing");
  write(file);
  if (!file) throw DataError(path->string() + ": write failed");
}

void write_file(const fs::path& path, const std::string& bytes) {
  emit(std::optional<fs::path>(path), std::cout,
       [&](std::ostream& o) { o.write(bytes.data(), static_cast<std::streamsize>(bytes.size())); });
}

nlohmann::ordered_json file_entry(const fs::path& path, const std::string& bytes) {
  return {{"path", path.string()},
          {"bytes", bytes.size()},
          {"fnv1a64", hex64(fnv1a64(bytes))}};
}

nlohmann::ordered_json config_json(const InductionConfig& config) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  std::istringstream lines(config.serialize());
  std::string line;
  while (std::getline(lines, line)) {
    const auto tab = line.find('\t');
    if (tab != std::string::npos) out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& log) {
  for (const auto& w : warnings) log << "warning: " << w << '\n';
}

void add_input_options(CLI::App* sub, InputOptions& in, bool with_path = true) {
  if (with_path) {
    sub->add_option("corpus", in.path, "Corpus file (plain text or form<TAB>tag lines)")
        ->required()
        ->check(CLI::ExistingFile);
  }
  // eval and neighbors use --format for the report instead.
  sub->add_option(with_path ? "--format,--input-format" : "--input-format", in.format,
                  "Input format: text, tagged or auto")
      ->check(CLI::IsMember({"text", "tagged", "auto"}));
  sub->add_option("--tagmap", in.tagmap, "Source-to-evaluation tag table")
      ->check(CLI::ExistingFile);
  sub->add_flag("--lowercase", in.lowercase, "Fold word forms to lower case");
  sub->add_option("--min-tag-count", in.min_tag_count,
                  "Evaluation tags with fewer gold tokens are excluded");
}

struct ConfigFlags {
  std::string experiment = "token";
  std::optional<std::size_t> buckshot_sample;
  std::string similarity = "cosine";
};

void add_config_options(CLI::App* sub, InductionConfig& c, ConfigFlags& flags) {
  sub->add_option("--experiment", flags.experiment, "type, token, natural or generalized")
      ->capture_default_str();
  sub->add_option("--features", c.features, "Feature words per context vector")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--dims", c.dims, "Reduced dimensionality")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--clusters", c.clusters, "Induced tags")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--neighbor-classes", c.neighbor_classes,
                  "Neighbor classes for generalized vectors")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--sample", c.sample, "Token positions sampled for induction")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--rare-threshold", c.rare_threshold,
                  "Minimum neighbor frequency for a natural context")
      ->capture_default_str();
  sub->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads; 0 uses every core")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--buckshot-sample", flags.buckshot_sample,
                  "Points agglomerated by Buckshot (default ceil(sqrt(k n)))");
  sub->add_option("--similarity", flags.similarity, "cosine or correlation")
      ->capture_default_str();
}

void finish_config(InductionConfig& c, const ConfigFlags& flags) {
  c.experiment = parse_experiment(flags.experiment);
  c.buckshot_sample = flags.buckshot_sample;
  c.similarity = parse_similarity(flags.similarity);
}

}  // namespace

EvalTagMap load_tagmap(const InputOptions& in) {
  return in.tagmap ? EvalTagMap::load(*in.tagmap) : EvalTagMap::default_map();
}

namespace {

InputFormat detect_format(const InputOptions& in) {
  if (in.format == "text") return InputFormat::Text;
  if (in.format == "tagged") return InputFormat::Tagged;
  if (in.format != "auto") {
    throw UsageError("unknown input format '" + in.format + "' (expected text, tagged or auto)");
  }
  std::ifstream file(in.path);
  if (!file) throw DataError(in.path.string() + ": cannot open file");
  std::string line;
  while (std::getline(file, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return line.find('\t') != std::string::npos ? InputFormat::Tagged : InputFormat::Text;
  }
  return InputFormat::Text;
}

}  // namespace

TokenStream read_input(const InputOptions& in, const EvalTagMap& map) {
  TokenizerOptions tokenizer;
  tokenizer.lowercase = in.lowercase;
  GoldOptions gold;
  gold.lowercase = in.lowercase;
  gold.min_tag_count = in.min_tag_count;
  return read_corpus_file(in.path, detect_format(in), map, tokenizer, gold);
}

void cmd_vocab(const VocabCommand& cmd, std::ostream& out) {
  const Vocabulary vocab = build_vocabulary(read_input(cmd.input, load_tagmap(cmd.input)));
  emit(cmd.out, out, [&](std::ostream& o) { vocab.write(o); });
}

void cmd_vectors(const VectorsCommand& cmd, std::ostream& log) {
  if (cmd.mode != "word" && cmd.mode != "generalized") {
    throw UsageError("unknown vector mode '" + cmd.mode + "' (expected word or generalized)");
  }
  if (cmd.side != "left" && cmd.side != "right" && cmd.side != "both") {
    throw UsageError("unknown side '" + cmd.side + "' (expected left, right or both)");
  }
  const Corpus corpus = make_corpus(read_input(cmd.input, load_tagmap(cmd.input)));
  ContextMatrices matrices = word_context_matrices(corpus, cmd.config);
  if (cmd.mode == "generalized") {
    matrices = generalized_context(corpus, matrices, cmd.config).vectors;
  }
  fs::create_directories(cmd.out);
  {
    std::ostringstream vocab;
    corpus.vocab.write(vocab);
    write_file(cmd.out / "vocabulary.tsv", vocab.str());
  }
  for (const Side side : {Side::Left, Side::Right}) {
    const std::string name = side == Side::Left ? "left" : "right";
    if (cmd.side != "both" && cmd.side != name) continue;
    std::ostringstream text;
    matrices.side(side).write(text);
    const fs::path path = cmd.out / (cmd.mode + "." + name + ".counts");
    write_file(path, text.str());
    log << path.string() << ": " << matrices.side(side).n_rows() << " x "
        << matrices.side(side).n_cols() << ", " << matrices.side(side).nnz()
        << " non-zero\n";
  }
}

void cmd_induce(const InduceCommand& cmd, std::ostream& log) {
  const std::string input_bytes = read_file(cmd.input.path);
  const Corpus corpus = make_corpus(read_input(cmd.input, load_tagmap(cmd.input)));
  const InductionModel model = induce(corpus, cmd.config);
  print_warnings(model.warnings, log);

  std::ostringstream bundle;
  model.write(bundle);
  const std::string bundle_bytes = bundle.str();
  write_file(cmd.out, bundle_bytes);

  nlohmann::ordered_json manifest;
  manifest["format"] = "posinduce-manifest";
  manifest["version"] = kManifestVersion;
  manifest["command"] = "induce";
  manifest["config"] = config_json(cmd.config);
  manifest["config_fingerprint"] = cmd.config.fingerprint();
  manifest["seed"] = cmd.config.seed;
  manifest["inputs"] = nlohmann::ordered_json::array({file_entry(cmd.input.path, input_bytes)});
  manifest["input_options"] = {{"format", cmd.input.format},
                               {"tagmap", cmd.input.tagmap ? cmd.input.tagmap->string() : ""},
                               {"lowercase", cmd.input.lowercase},
                               {"min_tag_count", cmd.input.min_tag_count}};
  manifest["outputs"] = nlohmann::ordered_json::array({file_entry(cmd.out, bundle_bytes)});
  manifest["warnings"] = model.warnings;
  fs::path manifest_path = cmd.out;
  manifest_path += ".manifest.json";
  write_file(manifest_path, manifest.dump(2) + "\n");

  log << to_string(cmd.config.experiment) << ": " << corpus.size() << " tokens, "
      << model.clusters.k() << " clusters, "
      << model.tagging.count(TokenState::Assigned) << " assigned, "
      << model.tagging.count(TokenState::Unassigned) << " unassigned, "
      << model.tagging.count(TokenState::Skipped) << " skipped\n";
}

void cmd_tag(const TagCommand& cmd, std::ostream& out) {
  std::ifstream file(cmd.bundle, std::ios::binary);
  if (!file) throw DataError(cmd.bundle.string() + ": cannot open file");
  const InductionModel model = InductionModel::read(file, cmd.bundle.string());
  const Corpus corpus = encode_corpus(read_input(cmd.input, load_tagmap(cmd.input)), model.vocab);
  InductionConfig config = model.config;
  if (cmd.check_config) config = cmd.config;
  config.threads = cmd.config.threads;
  const InducedTagging tagging = tag_corpus(model, corpus, config);
  emit(cmd.out, out, [&](std::ostream& o) { tagging.write(o); });
}

void cmd_eval(const EvalCommand& cmd, std::ostream& out) {
  EvaluationReport report;
  if (cmd.counts) {
    std::ifstream file(*cmd.counts);
    if (!file) throw DataError(cmd.counts->string() + ": cannot open file");
    report = rescore(parse_report(file, cmd.counts->string()));
  } else {
    if (!cmd.tagging) throw UsageError("eval needs a tagging and a gold corpus, or --counts");
    std::ifstream file(*cmd.tagging);
    if (!file) throw DataError(cmd.tagging->string() + ": cannot open file");
    const InducedTagging tagging = InducedTagging::read(file, cmd.tagging->string());

    InputOptions gold_in = cmd.gold;
    gold_in.format = "tagged";
    const EvalTagMap map = load_tagmap(gold_in);
    const TokenStream gold = read_input(gold_in, map);
    const ClusterTagMapping mapping =
        map_clusters_to_tags(tagging, gold.tokens, map.tags().size());
    EvalOptions options;
    options.count_unassigned = !cmd.exclude_unassigned;
    report = score(tagging, gold.tokens, mapping, map.tags(), options);
  }
  if (cmd.bundle) {
    const ContainerReader bundle = ContainerReader::read_file(*cmd.bundle, "bundle");
    report.fingerprint = bundle.meta("config_fingerprint");
    try {
      report.seed = std::stoull(bundle.meta("seed"));
    } catch (const std::logic_error&) {
      throw DataError(cmd.bundle->string() + ": malformed seed");
    }
  }
  emit(cmd.out, out, [&](std::ostream& o) { render_report(report, cmd.format, o); });
}

void cmd_neighbors(const NeighborsCommand& cmd, std::ostream& out) {
  std::ifstream file(cmd.bundle, std::ios::binary);
  if (!file) throw DataError(cmd.bundle.string() + ": cannot open file");
  const InductionModel model = InductionModel::read(file, cmd.bundle.string());
  std::vector<Neighbor> found;
  if (cmd.n > 0) {
    found = nearest_neighbors(model.vocab, cmd.word, side_space(model, cmd.side), cmd.n);
  } else if (!model.vocab.find(cmd.word)) {
    throw DataError("word '" + cmd.word + "' is not in the vocabulary");
  }
  emit(cmd.out, out, [&](std::ostream& o) {
    char buf[32];
    if (cmd.format == ReportFormat::Delimited) {
      o << "word\tsimilarity\n";
      for (const auto& nb : found) {
        std::snprintf(buf, sizeof buf, "%.17g", nb.similarity);
        o << model.vocab.word(nb.word) << '\t' << buf << '\n';
      }
      return;
    }
    o << cmd.word << " (" << to_string(cmd.side) << "):";
    for (const auto& nb : found) {
      std::snprintf(buf, sizeof buf, "%.3f", nb.similarity);
      o << ' ' << model.vocab.word(nb.word) << ' ' << buf;
    }
    o << '\n';
  });
}

void cmd_synth(const SynthCommand& cmd, std::ostream& log) {
  SyntheticOptions options;
  options.tokens = cmd.tokens;
  options.seed = cmd.seed;
  options.punctuation = cmd.punctuation;
  const SyntheticCorpus corpus = generate_synthetic(options);
  write_file(cmd.out, corpus.tagged);
  if (cmd.ambiguous_out) {
    std::string list;
    for (const auto& w : corpus.ambiguous_forms) list += w + '\n';
    write_file(*cmd.ambiguous_out, list);
  }
  log << cmd.out.string() << ": " << corpus.tokens << " tokens, " << corpus.types
      << " types, " << corpus.ambiguous_forms.size() << " ambiguous\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return 1;
  if (dynamic_cast<const NumericError*>(&e)) return 3;
  if (dynamic_cast<const std::bad_alloc*>(&e)) return 3;
  return 2;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributional part-of-speech induction"};
  app.name("posinduce");
  app.set_config("--config", "", "Read flags from an INI/TOML file; command line wins");
  app.require_subcommand(1);

  VocabCommand vocab;
  auto* vocab_cmd = app.add_subcommand("vocab", "Count word frequencies");
  add_input_options(vocab_cmd, vocab.input);
  vocab_cmd->add_option("--out", vocab.out, "Output file (default stdout)");

  VectorsCommand vectors;
  ConfigFlags vectors_flags;
  auto* vectors_cmd = app.add_subcommand("vectors", "Build context count matrices");
  add_input_options(vectors_cmd, vectors.input);
  add_config_options(vectors_cmd, vectors.config, vectors_flags);
  vectors_cmd->add_option("--mode", vectors.mode, "word or generalized")->capture_default_str();
  vectors_cmd->add_option("--side", vectors.side, "left, right or both")->capture_default_str();
  vectors_cmd->add_option("--out", vectors.out, "Output directory")->required();

  InduceCommand induce_args;
  ConfigFlags induce_flags;
  auto* induce_cmd = app.add_subcommand("induce", "Induce a tag set and write a bundle");
  add_input_options(induce_cmd, induce_args.input);
  add_config_options(induce_cmd, induce_args.config, induce_flags);
  induce_cmd->add_option("--out", induce_args.out, "Bundle path")->required();

  TagCommand tag;
  ConfigFlags tag_flags;
  auto* tag_cmd = app.add_subcommand("tag", "Tag a corpus with a bundle");
  tag_cmd->add_option("bundle", tag.bundle, "Bundle from induce")
      ->required()
      ->check(CLI::ExistingFile);
  add_input_options(tag_cmd, tag.input);
  add_config_options(tag_cmd, tag.config, tag_flags);
  tag_cmd->add_option("--out", tag.out, "Output file (default stdout)");

  EvalCommand eval;
  std::string eval_format = "text";
  std::optional<fs::path> eval_gold;
  auto* eval_cmd = app.add_subcommand("eval", "Score a tagging against gold tags");
  eval_cmd->add_option("tagging", eval.tagging, "Tagging from tag")->check(CLI::ExistingFile);
  eval_cmd->add_option("gold", eval_gold, "Gold corpus, form<TAB>tag lines")
      ->check(CLI::ExistingFile);
  add_input_options(eval_cmd, eval.gold, false);
  eval_cmd->add_option("--counts", eval.counts, "Rescore a delimited count report")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--bundle", eval.bundle, "Label the report with this bundle's config")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--format", eval_format, "text or delimited")->capture_default_str();
  eval_cmd->add_flag("--exclude-unassigned", eval.exclude_unassigned,
                     "Leave unassigned tokens out of recall denominators");
  eval_cmd->add_option("--out", eval.out, "Output file (default stdout)");

  NeighborsCommand neighbors;
  std::string neighbors_side = "left";
  std::string neighbors_format = "text";
  auto* neighbors_cmd = app.add_subcommand("neighbors", "Nearest words in a side space");
  neighbors_cmd->add_option("bundle", neighbors.bundle, "Bundle from induce")
      ->required()
      ->check(CLI::ExistingFile);
  neighbors_cmd->add_option("word", neighbors.word, "Query word")->required();
  neighbors_cmd->add_option("--side", neighbors_side, "left or right")->capture_default_str();
  neighbors_cmd->add_option("-n,--count", neighbors.n, "Neighbors to list")->capture_default_str();
  neighbors_cmd->add_option("--format", neighbors_format, "text or delimited")
      ->capture_default_str();
  neighbors_cmd->add_option("--out", neighbors.out, "Output file (default stdout)");

  SynthCommand synth;
  bool no_punct = false;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a tagged synthetic corpus");
  synth_cmd->add_option("--tokens", synth.tokens, "Minimum token count")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_flag("--no-punctuation", no_punct, "Omit periods and commas");
  synth_cmd->add_option("--ambiguous", synth.ambiguous_out, "Write ambiguous forms here");
  synth_cmd->add_option("--out", synth.out, "Output file")->required();

  for (auto* sub : app.get_subcommands({})) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (vocab_cmd->parsed()) {
      cmd_vocab(vocab, out);
    } else if (vectors_cmd->parsed()) {
      finish_config(vectors.config, vectors_flags);
      cmd_vectors(vectors, err);
    } else if (induce_cmd->parsed()) {
      finish_config(induce_args.config, induce_flags);
      cmd_induce(induce_args, err);
    } else if (tag_cmd->parsed()) {
      finish_config(tag.config, tag_flags);
      for (const char* name : {"--experiment", "--features", "--dims", "--clusters",
                               "--rare-threshold"}) {
        tag.check_config = tag.check_config || tag_cmd->count(name) > 0;
      }
      cmd_tag(tag, out);
    } else if (eval_cmd->parsed()) {
      eval.format = parse_report_format(eval_format);
      if (!eval.counts) {
        if (!eval.tagging || !eval_gold) {
          throw UsageError("eval needs a tagging and a gold corpus, or --counts");
        }
        eval.gold.path = *eval_gold;
      }
      cmd_eval(eval, out);
    } else if (neighbors_cmd->parsed()) {
      neighbors.side = parse_side(neighbors_side);
      neighbors.format = parse_report_format(neighbors_format);
      cmd_neighbors(neighbors, out);
    } else if (synth_cmd->parsed()) {
      synth.punctuation = !no_punct;
      cmd_synth(synth, err);
    }
  } catch (const std::exception& e) {
    err << "posinduce: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}

}  // namespace posinduce::cli
