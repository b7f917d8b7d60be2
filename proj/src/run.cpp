#include "paraprobe/report.hpp"

#include "paraprobe/error.hpp"
#include "paraprobe/external_scorer.hpp"
#include "paraprobe/transforms.hpp"
#include "output.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

namespace paraprobe {

std::string_view to_string(ScorerKind kind) { return kind == ScorerKind::bow ? "bow" : "external"; }

std::string_view to_string(Scale scale) { return scale == Scale::unit ? "unit" : "percent"; }

std::string_view to_string(Probe probe) {
  switch (probe) {
    case Probe::classification: return "classification";
    case Probe::reverse: return "reverse";
    case Probe::identical: return "identical";
    case Probe::rank: return "rank";
    case Probe::hist: return "hist";
  }
  return "unknown";
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::ingest: return "ingest";
    case Command::probe: return "probe";
    case Command::rank: return "rank";
    case Command::hist: return "hist";
    case Command::augment: return "augment";
  }
  return "unknown";
}

Scale parse_scale(std::string_view text) {
  if (text == "unit") return Scale::unit;
  if (text == "percent") return Scale::percent;
  throw ConfigError("unknown scale '" + std::string(text) + "'");
}

Probe parse_probe(std::string_view text) {
  for (auto p : {Probe::classification, Probe::reverse, Probe::identical, Probe::rank, Probe::hist}) {
    if (text == to_string(p)) return p;
  }
  throw ConfigError("unknown probe '" + std::string(text) + "'");
}

std::set<Probe> all_probes() {
  return {Probe::classification, Probe::reverse, Probe::identical, Probe::rank, Probe::hist};
}

std::set<Probe> parse_probe_list(std::string_view text) {
  std::set<Probe> probes;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = text.substr(0, comma);
    if (item == "all") {
      probes = all_probes();
    } else if (!item.empty()) {
      probes.insert(parse_probe(item));
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return probes;
}

void RunConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("threshold must lie in [0, 1]");
  }
  if (data.empty()) throw ConfigError("no dataset given");
  const bool probing = command == Command::probe || command == Command::rank || command == Command::hist;
  if (probing && probes.empty()) throw ConfigError("at least one probe must be selected");
  if (bins == 0) throw ConfigError("--bins must be positive");
  if (scorer == ScorerKind::external) {
    if (external_cmd.empty() == external_addr.empty()) {
      throw ConfigError("external scorer needs exactly one of --external-cmd or --external-addr");
    }
    if (!external_addr.empty()) TcpAddress::parse(external_addr);
  }
}

std::string RunConfig::canonical_json() const {
  nlohmann::json j;  // std::map backed: keys come out sorted
  j["command"] = to_string(command);
  j["data"] = data.string();
  j["format"] = to_string(format);
  j["has_header"] = has_header ? nlohmann::json(*has_header) : nlohmann::json(nullptr);
  j["scorer"] = to_string(scorer);
  if (scorer == ScorerKind::external) {
    j["external_cmd"] = external_cmd;
    j["external_addr"] = external_addr;
    j["external_timeout_ms"] = external_timeout.count();
  } else {
    j["bow"] = {{"lowercase", bow.tokenizer.lowercase},
                {"strip_punctuation", bow.tokenizer.strip_punctuation},
                {"binary", bow.binary},
                {"bigrams", bow.bigrams}};
  }
  j["threshold"] = threshold;
  nlohmann::json probe_names = nlohmann::json::array();
  for (auto p : probes) probe_names.push_back(to_string(p));
  j["probes"] = probe_names;
  j["bins"] = bins;
  j["scale"] = to_string(scale);
  j["seed"] = seed;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

namespace {

class Sha256 {
public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("sha256 init failed");
    }
  }
  void update(std::string_view data) { EVP_DigestUpdate(ctx_.get(), data.data(), data.size()); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 0xF];
    }
    return out;
  }

private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  Sha256 h;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    h.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return h.hex();
}

}  // namespace

std::string config_digest(const RunConfig& config) {
  Sha256 h;
  h.update(config.canonical_json());
  return "sha256:" + h.hex();
}

ProbeReport execute_probes(const RunConfig& config, const ParseResult& parsed, Scorer& scorer) {
  const Corpus& corpus = parsed.corpus;
  const Threshold threshold(config.threshold);
  const auto& probes = config.probes;
  auto wants = [&](Probe p) { return probes.contains(p); };

  ProbeReport report;
  report.meta.config_digest = config_digest(config);
  report.meta.corpus_name = corpus.name;
  report.meta.format = corpus.source_format;
  report.meta.scorer = scorer.name();
  report.meta.stats = corpus_stats(corpus);
  report.meta.tally = parsed.tally;

  if (wants(Probe::classification)) {
    for (const auto& p : corpus.pairs) {
      if (!p.label) throw PreconditionError("classification needs gold labels; pair '" + p.id + "' has none");
    }
  }

  // Everything any probe reads: both orders of every pair plus (s, s) for
  // every distinct sentence. Scored once.
  ScoreBook book;
  const bool needs_pairs = wants(Probe::classification) || wants(Probe::reverse) ||
                           wants(Probe::rank) || wants(Probe::hist);
  if (needs_pairs) book.fill(scorer, augment_reverse(corpus).pairs);
  if (wants(Probe::identical) || wants(Probe::rank) || wants(Probe::hist)) {
    book.fill(scorer, identical_pairs(corpus).pairs);
  }

  if (wants(Probe::classification)) report.classification = classification_metrics(corpus, book, threshold);
  if (wants(Probe::reverse)) report.reverse = reverse_disagreement(corpus, book, threshold);
  if (wants(Probe::identical)) report.identical = identical_error_rate(corpus, book, threshold);

  std::optional<RankComparison> comparison;
  if (wants(Probe::rank) || wants(Probe::hist)) comparison = build_rank_comparison(corpus);
  if (wants(Probe::rank)) report.rank = rank_violations(*comparison, book);
  if (wants(Probe::hist)) {
    report.score_histograms =
        score_histogram(histogram_inputs(corpus), book, BinEdges::uniform(0.0, 1.0, config.bins));
    report.difference_histograms =
        score_difference_histogram(*comparison, book, BinEdges::uniform(-1.0, 1.0, config.bins));
  }
  return report;
}

namespace {

std::unique_ptr<Scorer> make_scorer(const RunConfig& config) {
  if (config.scorer == ScorerKind::bow) return std::make_unique<BowScorer>(config.bow);
  ExternalScorerOptions options;
  options.timeout = config.external_timeout;
  auto scorer = config.external_cmd.empty()
                    ? ExternalScorer::connect(TcpAddress::parse(config.external_addr), options)
                    : ExternalScorer::spawn(config.external_cmd, options);
  scorer->ping();
  return scorer;
}

std::string canonical_tsv(const Corpus& corpus) {
  std::ostringstream os;
  write_canonical(os, corpus);
  return os.str();
}

}  // namespace

RunResult run(const RunConfig& input) {
  RunConfig config = input;
  if (config.command == Command::rank) config.probes = {Probe::rank};
  if (config.command == Command::hist) config.probes = {Probe::hist};
  if (config.command == Command::ingest || config.command == Command::augment) config.probes.clear();
  config.validate();

  ParseOptions parse_options;
  parse_options.has_header = config.has_header;
  const ParseResult parsed = parse_file(config.data, config.format, parse_options);
  const std::string data_hash = file_sha256(config.data);

  RunResult result;
  std::vector<std::pair<std::filesystem::path, std::string>> extra_files;

  if (config.command == Command::ingest || config.command == Command::augment) {
    auto& meta = result.report.meta;
    meta.config_digest = config_digest(config);
    meta.corpus_name = parsed.corpus.name;
    meta.format = parsed.corpus.source_format;
    meta.scorer = "none";
    meta.stats = corpus_stats(parsed.corpus);
    meta.tally = parsed.tally;
    if (config.command == Command::ingest) {
      extra_files.emplace_back(config.out / "corpus.tsv", canonical_tsv(parsed.corpus));
    } else {
      extra_files.emplace_back(config.out / "augmented" / "reverse.tsv",
                               canonical_tsv(augment_reverse(parsed.corpus)));
      extra_files.emplace_back(config.out / "augmented" / "identical.tsv",
                               canonical_tsv(augment_identical(parsed.corpus)));
    }
  } else {
    auto scorer = make_scorer(config);
    result.report = execute_probes(config, parsed, *scorer);
  }
  result.report.meta.data_sha256 = data_hash;

  // Emission starts only after every computation succeeded.
  for (const auto& [path, content] : extra_files) {
    detail::write_output_file(path, content);
    result.files.push_back(path);
  }
  for (auto& f : emit_tables(result.report, config.scale, config.out)) result.files.push_back(f);
  for (auto& f : emit_histograms(result.report, config.out)) result.files.push_back(f);
  emit_report_json(result.report, config, config.out / "report.json");
  result.files.push_back(config.out / "report.json");
  return result;
}

}  // namespace paraprobe
