#include "paraprobe/report.hpp"

#include "paraprobe/error.hpp"
#include "output.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace paraprobe {

using nlohmann::ordered_json;

void detail::write_output_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw OutputError("cannot create '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) throw OutputError("cannot write '" + path.string() + "'");
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

namespace {

// Rounds a plain decimal string ("-12.3456") to two decimals, ties away
// from zero.
std::string round_decimal_2(std::string digits) {
  bool negative = false;
  if (!digits.empty() && digits.front() == '-') {
    negative = true;
    digits.erase(0, 1);
  }
  auto dot = digits.find('.');
  std::string integer = dot == std::string::npos ? digits : digits.substr(0, dot);
  std::string frac = dot == std::string::npos ? std::string{} : digits.substr(dot + 1);
  if (integer.empty()) integer = "0";
  frac.resize(std::max<std::size_t>(frac.size(), 3), '0');

  // Work on the digit string integer + first two fraction digits.
  std::string kept = integer + frac.substr(0, 2);
  if (frac[2] >= '5') {
    std::size_t i = kept.size();
    while (i > 0) {
      --i;
      if (kept[i] == '9') {
        kept[i] = '0';
      } else {
        ++kept[i];
        break;
      }
      if (i == 0) kept.insert(kept.begin(), '1');
    }
  }
  std::string out = kept.substr(0, kept.size() - 2) + "." + kept.substr(kept.size() - 2);
  const bool zero = out.find_first_not_of("0.") == std::string::npos;
  return (negative && !zero) ? "-" + out : out;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_scaled(double value, Scale scale) {
  if (scale == Scale::unit) return format_double(value);
  char buf[512];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value * 100.0, std::chars_format::fixed);
  if (ec != std::errc{}) return "nan";
  return round_decimal_2(std::string(buf, ptr));
}

std::vector<MetricRecord> ProbeReport::metrics() const {
  std::vector<MetricRecord> out;
  if (classification) {
    const auto n = classification->counts.total();
    out.push_back({"classification.accuracy", classification->accuracy, n});
    out.push_back({"classification.f1", classification->f1, n});
  }
  if (reverse) out.push_back({"asymmetry.reverse_order", reverse->ratio, reverse->evaluated});
  if (identical) out.push_back({"asymmetry.identical", identical->ratio, identical->evaluated});
  if (rank) {
    out.push_back({"rank.paraphrase_gt_identical", rank->paraphrase.fraction, rank->paraphrase.evaluated});
    out.push_back({"rank.paraphrase_avg_diff", rank->paraphrase.avg_diff, rank->paraphrase.violations});
    out.push_back({"rank.non_paraphrase_gt_identical", rank->non_paraphrase.fraction,
                   rank->non_paraphrase.evaluated});
    out.push_back({"rank.non_paraphrase_avg_diff", rank->non_paraphrase.avg_diff,
                   rank->non_paraphrase.violations});
  }
  return out;
}

std::vector<std::filesystem::path> emit_tables(const ProbeReport& report, Scale scale,
                                               const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  const auto& meta = report.meta;
  const std::string prefix = csv_field(meta.corpus_name) + "," + csv_field(meta.scorer) + ",";
  const std::string digest = "," + meta.config_digest + "\n";
  auto f = [scale](double v) { return format_scaled(v, scale); };

  if (report.classification) {
    const auto& c = *report.classification;
    std::ostringstream os;
    os << "dataset,scorer,n,accuracy,f1,tp,fp,tn,fn,config_digest\n"
       << prefix << c.counts.total() << ',' << f(c.accuracy) << ',' << f(c.f1) << ',' << c.counts.tp
       << ',' << c.counts.fp << ',' << c.counts.tn << ',' << c.counts.fn << digest;
    written.push_back(out_dir / "tables" / "classification.csv");
    detail::write_output_file(written.back(), os.str());
  }
  if (report.reverse || report.identical) {
    std::ostringstream os;
    os << "dataset,scorer,reverse_order,reverse_flagged,reverse_n,identical,identical_flagged,"
          "identical_n,config_digest\n"
       << prefix;
    auto cells = [&](const std::optional<RatioResult>& r) {
      if (r) os << f(r->ratio) << ',' << r->flagged << ',' << r->evaluated;
      else os << ",,";
    };
    cells(report.reverse);
    os << ',';
    cells(report.identical);
    os << digest;
    written.push_back(out_dir / "tables" / "asymmetry.csv");
    detail::write_output_file(written.back(), os.str());
  }
  if (report.rank) {
    const auto& r = *report.rank;
    std::ostringstream os;
    os << "dataset,scorer,paraphrase_gt_identical,paraphrase_avg_diff,paraphrase_violations,"
          "paraphrase_n,non_paraphrase_gt_identical,non_paraphrase_avg_diff,"
          "non_paraphrase_violations,non_paraphrase_n,config_digest\n"
       << prefix << f(r.paraphrase.fraction) << ',' << f(r.paraphrase.avg_diff) << ','
       << r.paraphrase.violations << ',' << r.paraphrase.evaluated << ','
       << f(r.non_paraphrase.fraction) << ',' << f(r.non_paraphrase.avg_diff) << ','
       << r.non_paraphrase.violations << ',' << r.non_paraphrase.evaluated << digest;
    written.push_back(out_dir / "tables" / "rank_violation.csv");
    detail::write_output_file(written.back(), os.str());
  }
  return written;
}

std::vector<std::filesystem::path> emit_histograms(const ProbeReport& report,
                                                   const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::vector<HistogramBins>& hists, const char* file) {
    if (hists.empty()) return;
    std::ostringstream os;
    os << "category,bin_lo,bin_hi,count,config_digest\n";
    for (const auto& h : hists) {
      for (std::size_t i = 0; i < h.counts.size(); ++i) {
        os << to_string(h.category) << ',' << format_double(h.edges[i]) << ','
           << format_double(h.edges[i + 1]) << ',' << h.counts[i] << ',' << report.meta.config_digest
           << '\n';
      }
    }
    written.push_back(out_dir / "hist" / file);
    detail::write_output_file(written.back(), os.str());
  };
  emit(report.score_histograms, "score.csv");
  emit(report.difference_histograms, "score_difference.csv");
  return written;
}

namespace {

ordered_json ratio_json(const RatioResult& r) {
  return {{"ratio", r.ratio}, {"flagged", r.flagged}, {"evaluated", r.evaluated},
          {"flagged_items", r.flagged_items}};
}

ordered_json violation_json(const ViolationStats& s) {
  return {{"fraction", s.fraction}, {"avg_diff", s.avg_diff}, {"violations", s.violations},
          {"evaluated", s.evaluated}};
}

}  // namespace

void emit_report_json(const ProbeReport& report, const RunConfig& config,
                      const std::filesystem::path& path) {
  const auto& m = report.meta;
  ordered_json skipped = ordered_json::array();
  for (const auto& s : m.tally.skipped) skipped.push_back({{"line", s.line}, {"reason", s.reason}});

  ordered_json j;
  j["config_digest"] = m.config_digest;
  j["config"] = ordered_json::parse(config.canonical_json());
  j["corpus"] = {
      {"name", m.corpus_name},
      {"format", to_string(m.format)},
      {"data_sha256", m.data_sha256},
      {"pairs", m.stats.pairs},
      {"paraphrase", m.stats.paraphrase},
      {"non_paraphrase", m.stats.non_paraphrase},
      {"unlabeled", m.stats.unlabeled},
      {"distinct_sentences", m.stats.distinct_sentences},
      {"self_pairs", m.stats.self_pairs},
      {"tally",
       {{"data_rows", m.tally.data_rows},
        {"emitted", m.tally.emitted},
        {"skipped", m.tally.rows_skipped()},
        {"discarded", m.tally.discarded},
        {"skipped_rows", skipped}}},
  };
  j["scorer"] = m.scorer;

  ordered_json metrics = ordered_json::array();
  for (const auto& r : report.metrics()) {
    metrics.push_back({{"name", r.name}, {"value", r.value}, {"count", r.count}});
  }
  j["metrics"] = metrics;

  if (report.classification) {
    const auto& c = *report.classification;
    j["classification"] = {{"accuracy", c.accuracy}, {"f1", c.f1}, {"tp", c.counts.tp},
                           {"fp", c.counts.fp},      {"tn", c.counts.tn}, {"fn", c.counts.fn}};
  }
  if (report.reverse) j["reverse_order"] = ratio_json(*report.reverse);
  if (report.identical) j["identical"] = ratio_json(*report.identical);
  if (report.rank) {
    const auto& r = *report.rank;
    j["rank_violation"] = {{"counting", "per candidate"},
                           {"groups", r.groups},
                           {"excluded_self_pairs", r.excluded_self_pairs},
                           {"unlabeled_candidates", r.unlabeled_candidates},
                           {"paraphrase", violation_json(r.paraphrase)},
                           {"non_paraphrase", violation_json(r.non_paraphrase)}};
  }
  detail::write_output_file(path, j.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n");
}

}  // namespace paraprobe
