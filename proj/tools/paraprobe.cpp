// paraprobe: diagnostic probes for pointwise paraphrase scorers.
//
//   paraprobe probe   --data dev.tsv --format qqp --scorer bow --out runs/qqp
//   paraprobe augment --data train.tsv --format qqp --out runs/qqp-train
//
// Exit codes: 0 ok, 2 config, 3 data, 4 scorer protocol, 5 output, 1 other.

#include "paraprobe/error.hpp"
#include "paraprobe/report.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CliOptions {
  std::string data;
  std::string format = "canonical";
  std::string header = "auto";
  std::string scorer = "bow";
  std::string external_cmd;
  std::string external_addr;
  int timeout_ms = 30000;
  double threshold = 0.5;
  std::string probes = "all";
  std::size_t bins = paraprobe::kDefaultBins;
  std::string scale = "percent";
  std::string out = "out";
  std::uint64_t seed = 0;
  bool bow_binary = false;
  bool bow_keep_case = false;
  bool bow_keep_punct = false;
  bool bow_unigrams_only = false;
};

void add_data_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--data", o.data, "Corpus file")->required();
  cmd->add_option("--format", o.format, "qqp | paws | mrpc | twitter | canonical")
      ->check(CLI::IsMember({"qqp", "paws", "mrpc", "twitter", "canonical"}));
  cmd->add_option("--header", o.header, "auto | yes | no (auto = published layout)")
      ->check(CLI::IsMember({"auto", "yes", "no"}));
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Reserved; all current probes are deterministic");
}

void add_probe_options(CLI::App* cmd, CliOptions& o, bool probe_list) {
  cmd->add_option("--scorer", o.scorer, "bow | external")->check(CLI::IsMember({"bow", "external"}));
  cmd->add_option("--external-cmd", o.external_cmd, "Command speaking the scorer protocol on stdio");
  cmd->add_option("--external-addr", o.external_addr, "HOST:PORT of a scorer speaking the protocol");
  cmd->add_option("--timeout-ms", o.timeout_ms, "External scorer response timeout");
  cmd->add_option("--threshold", o.threshold, "Paraphrase iff score > threshold");
  if (probe_list) {
    cmd->add_option("--probes", o.probes, "classification,reverse,identical,rank,hist or all");
  }
  cmd->add_option("--bins", o.bins, "Histogram bins");
  cmd->add_option("--scale", o.scale, "unit | percent")->check(CLI::IsMember({"unit", "percent"}));
  cmd->add_flag("--bow-binary", o.bow_binary, "Binary instead of count vectors");
  cmd->add_flag("--bow-keep-case", o.bow_keep_case, "Disable lowercasing");
  cmd->add_flag("--bow-keep-punct", o.bow_keep_punct, "Disable punctuation stripping");
  cmd->add_flag("--bow-unigrams-only", o.bow_unigrams_only, "Drop bigram features");
}

paraprobe::RunConfig to_config(const CliOptions& o, paraprobe::Command command) {
  paraprobe::RunConfig c;
  c.command = command;
  c.data = o.data;
  c.format = paraprobe::parse_source_format(o.format);
  if (o.header != "auto") c.has_header = o.header == "yes";
  c.scorer = o.scorer == "external" ? paraprobe::ScorerKind::external : paraprobe::ScorerKind::bow;
  c.external_cmd = o.external_cmd;
  c.external_addr = o.external_addr;
  c.external_timeout = std::chrono::milliseconds(o.timeout_ms);
  c.bow.binary = o.bow_binary;
  c.bow.tokenizer.lowercase = !o.bow_keep_case;
  c.bow.tokenizer.strip_punctuation = !o.bow_keep_punct;
  c.bow.bigrams = !o.bow_unigrams_only;
  c.threshold = o.threshold;
  c.probes = paraprobe::parse_probe_list(o.probes);
  c.bins = o.bins;
  c.scale = paraprobe::parse_scale(o.scale);
  c.out = o.out;
  c.seed = o.seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagnostic probes for pointwise paraphrase-identification scorers"};
  app.require_subcommand(1);
  CliOptions opts;

  auto* ingest = app.add_subcommand("ingest", "Parse a corpus and write it as canonical TSV");
  auto* probe = app.add_subcommand("probe", "Run the selected probes and emit tables and histograms");
  auto* rank = app.add_subcommand("rank", "Random-vs-identical rank violations only");
  auto* hist = app.add_subcommand("hist", "Score and score-difference histograms only");
  auto* augment = app.add_subcommand("augment", "Write reverse- and identical-augmented training files");

  for (auto* cmd : {ingest, probe, rank, hist, augment}) add_data_options(cmd, opts);
  add_probe_options(probe, opts, true);
  add_probe_options(rank, opts, false);
  add_probe_options(hist, opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : paraprobe::kExitConfig;
  }

  paraprobe::Command command = paraprobe::Command::probe;
  if (ingest->parsed()) command = paraprobe::Command::ingest;
  else if (rank->parsed()) command = paraprobe::Command::rank;
  else if (hist->parsed()) command = paraprobe::Command::hist;
  else if (augment->parsed()) command = paraprobe::Command::augment;

  try {
    auto result = paraprobe::run(to_config(opts, command));
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    return paraprobe::kExitOk;
  } catch (const paraprobe::ConfigError& e) {
    std::cerr << "paraprobe: config error: " << e.what() << '\n';
    return paraprobe::kExitConfig;
  } catch (const paraprobe::ProtocolError& e) {
    std::cerr << "paraprobe: scorer protocol error: " << e.what() << '\n';
    return paraprobe::kExitProtocol;
  } catch (const paraprobe::OutputError& e) {
    std::cerr << "paraprobe: output error: " << e.what() << '\n';
    return paraprobe::kExitOutput;
  } catch (const paraprobe::IoError& e) {
    std::cerr << "paraprobe: data error: " << e.what() << '\n';
    return paraprobe::kExitData;
  } catch (const paraprobe::FormatError& e) {
    std::cerr << "paraprobe: data error: " << e.what() << '\n';
    return paraprobe::kExitData;
  } catch (const paraprobe::PreconditionError& e) {
    std::cerr << "paraprobe: data error: " << e.what() << '\n';
    return paraprobe::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "paraprobe: " << e.what() << '\n';
    return paraprobe::kExitInternal;
  }
}
