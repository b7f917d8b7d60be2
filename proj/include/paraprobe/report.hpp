#pragma once

#include "paraprobe/bow.hpp"
#include "paraprobe/corpus.hpp"
#include "paraprobe/probes.hpp"
#include "paraprobe/scorer.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace paraprobe {

enum class ScorerKind { bow, external };
enum class Scale { unit, percent };
enum class Probe { classification, reverse, identical, rank, hist };
enum class Command { ingest, probe, rank, hist, augment };

std::string_view to_string(ScorerKind kind);
std::string_view to_string(Scale scale);
std::string_view to_string(Probe probe);
std::string_view to_string(Command command);
Scale parse_scale(std::string_view text);
Probe parse_probe(std::string_view text);
// Comma separated probe names; "all" selects every probe.
std::set<Probe> parse_probe_list(std::string_view text);
std::set<Probe> all_probes();

struct RunConfig {
  Command command = Command::probe;

  std::filesystem::path data;
  SourceFormat format = SourceFormat::canonical;
  std::optional<bool> has_header;

  ScorerKind scorer = ScorerKind::bow;
  std::string external_cmd;
  std::string external_addr;
  std::chrono::milliseconds external_timeout{30000};
  BowConfig bow;

  double threshold = 0.5;
  std::set<Probe> probes = all_probes();
  std::size_t bins = kDefaultBins;
  Scale scale = Scale::percent;
  std::filesystem::path out = "out";
  // Reserved for sampling probes; every current probe is deterministic.
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;
  // Sorted-key JSON of every field except `out`.
  std::string canonical_json() const;
};

// "sha256:<hex>" of canonical_json().
std::string config_digest(const RunConfig& config);

struct MetricRecord {
  std::string name;
  double value = 0.0;
  std::size_t count = 0;
};

struct RunMetadata {
  std::string config_digest;
  std::string corpus_name;
  SourceFormat format = SourceFormat::canonical;
  std::string data_sha256;
  std::string scorer;
  CorpusStats stats;
  ParseTally tally;
};

struct ProbeReport {
  RunMetadata meta;
  std::optional<ClassificationReport> classification;
  std::optional<RatioResult> reverse;
  std::optional<RatioResult> identical;
  std::optional<RankViolationReport> rank;
  std::vector<HistogramBins> score_histograms;
  std::vector<HistogramBins> difference_histograms;

  // Flat (name, value, count) view of every computed metric, unscaled.
  std::vector<MetricRecord> metrics() const;
};

// Runs the selected probes of `config` on an already parsed corpus. No I/O.
ProbeReport execute_probes(const RunConfig& config, const ParseResult& parsed, Scorer& scorer);

// Formats a [0,1] quantity for a table cell. Percent: x100, two decimals,
// ties rounded away from zero on the shortest decimal form of the value.
// Unit: shortest round-trip form, unrounded.
std::string format_scaled(double value, Scale scale);

// Shortest round-trip decimal form.
std::string format_double(double value);

// tables/{classification,asymmetry,rank_violation}.csv for the probes
// present in `report`. Returns the written paths.
std::vector<std::filesystem::path> emit_tables(const ProbeReport& report, Scale scale,
                                               const std::filesystem::path& out_dir);

// hist/score.csv and hist/score_difference.csv, rows (category, bin_lo,
// bin_hi, count, config_digest).
std::vector<std::filesystem::path> emit_histograms(const ProbeReport& report,
                                                   const std::filesystem::path& out_dir);

void emit_report_json(const ProbeReport& report, const RunConfig& config,
                      const std::filesystem::path& path);

struct RunResult {
  ProbeReport report;
  std::vector<std::filesystem::path> files;
};

// Full pipeline for config.command: ingest, transforms, scoring, probes and
// emission. Everything is computed before the first file is written.
RunResult run(const RunConfig& config);

// Exit codes of the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitProtocol = 4;
inline constexpr int kExitOutput = 5;

}  // namespace paraprobe
