#include "paraprobe/corpus.hpp"

#include "paraprobe/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>
#include <utility>

namespace paraprobe {

std::string_view to_string(Label label) {
  return label == Label::paraphrase ? "paraphrase" : "non-paraphrase";
}

std::string_view to_string(SourceFormat format) {
  switch (format) {
    case SourceFormat::qqp: return "qqp";
    case SourceFormat::paws: return "paws";
    case SourceFormat::mrpc: return "mrpc";
    case SourceFormat::twitter_url: return "twitter";
    case SourceFormat::canonical: return "canonical";
  }
  return "unknown";
}

SourceFormat parse_source_format(std::string_view name) {
  if (name == "qqp") return SourceFormat::qqp;
  if (name == "paws") return SourceFormat::paws;
  if (name == "mrpc") return SourceFormat::mrpc;
  if (name == "twitter" || name == "twitter_url") return SourceFormat::twitter_url;
  if (name == "canonical") return SourceFormat::canonical;
  throw ConfigError("unknown corpus format '" + std::string(name) + "'");
}

TwitterLabel::TwitterLabel(int agree, int total) : agree_(agree), total_(total) {
  if (total != kAnnotators || agree < 0 || agree > total) {
    throw FormatError("twitter label (" + std::to_string(agree) + ", " +
                      std::to_string(total) + ") out of range");
  }
}

namespace {

std::string_view trim_spaces(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<int> parse_int(std::string_view s) {
  s = trim_spaces(s);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

}  // namespace

TwitterLabel TwitterLabel::parse(std::string_view field) {
  auto f = trim_spaces(field);
  auto comma = f.find(',');
  if (f.size() < 5 || f.front() != '(' || f.back() != ')' || comma == std::string_view::npos) {
    throw FormatError("unparseable twitter label '" + std::string(field) + "'");
  }
  auto agree = parse_int(f.substr(1, comma - 1));
  auto total = parse_int(f.substr(comma + 1, f.size() - comma - 2));
  if (!agree || !total) {
    throw FormatError("unparseable twitter label '" + std::string(field) + "'");
  }
  return TwitterLabel(*agree, *total);
}

std::optional<Label> TwitterLabel::label() const noexcept {
  if (agree_ >= 4) return Label::paraphrase;
  if (agree_ <= 2) return Label::non_paraphrase;
  return std::nullopt;
}

namespace {

constexpr std::string_view kUtf8Bom = "\xEF\xBB\xBF";

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// What a format adapter decided about one data row.
struct RowOutcome {
  std::optional<SentencePair> pair;
  std::string skip_reason;
  bool discard = false;

  static RowOutcome skip(std::string reason) { return {std::nullopt, std::move(reason), false}; }
  static RowOutcome discarded() { return {std::nullopt, {}, true}; }
};

std::string expected_header_text(const std::vector<std::string_view>& header) {
  std::string text;
  for (const auto& h : header) {
    if (!text.empty()) text += "\\t";
    text += h;
  }
  return text;
}

template <class RowFn>
ParseResult parse_tsv(std::istream& in, Corpus corpus, bool has_header,
                      const std::vector<std::string_view>& header, RowFn&& row_fn) {
  ParseResult result{std::move(corpus), {}};
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view(line);
    if (line_no == 1 && view.starts_with(kUtf8Bom)) view.remove_prefix(kUtf8Bom.size());

    if (line_no == 1 && has_header) {
      auto fields = split_tabs(view);
      bool ok = fields.size() == header.size();
      for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = trim_spaces(fields[i]) == header[i];
      if (!ok) {
        throw FormatError("missing or unexpected header in " + result.corpus.name +
                          " input; expected '" + expected_header_text(header) + "'");
      }
      continue;
    }

    ++result.tally.data_rows;
    auto outcome = row_fn(split_tabs(view), line_no);
    if (outcome.discard) {
      ++result.tally.discarded;
    } else if (!outcome.pair) {
      result.tally.skipped.push_back({line_no, std::move(outcome.skip_reason)});
    } else if (!seen_ids.insert(outcome.pair->id).second) {
      result.tally.skipped.push_back({line_no, "duplicate id '" + outcome.pair->id + "'"});
    } else {
      result.corpus.pairs.push_back(std::move(*outcome.pair));
      ++result.tally.emitted;
    }
  }
  if (in.bad()) throw IoError("read error while parsing " + result.corpus.name);
  if (has_header && line_no == 0) {
    throw FormatError("missing header in " + result.corpus.name + " input (empty stream)");
  }
  return result;
}

std::string column_count_reason(std::size_t got, std::size_t want) {
  return "expected " + std::to_string(want) + " columns, got " + std::to_string(got);
}

std::optional<Label> binary_label(std::string_view field) {
  field = trim_spaces(field);
  if (field == "1") return Label::paraphrase;
  if (field == "0") return Label::non_paraphrase;
  return std::nullopt;
}

Corpus make_corpus(const ParseOptions& options, std::string default_name, SourceFormat format) {
  Corpus c;
  c.name = options.name.empty() ? std::move(default_name) : options.name;
  c.source_format = format;
  return c;
}

}  // namespace

ParseResult parse_qqp(std::istream& in, const ParseOptions& options) {
  static const std::vector<std::string_view> header{"id", "qid1", "qid2", "question1",
                                                    "question2", "is_duplicate"};
  return parse_tsv(in, make_corpus(options, "qqp", SourceFormat::qqp),
                   options.has_header.value_or(true), header,
                   [](const std::vector<std::string_view>& f, std::size_t) {
                     if (f.size() != 6) return RowOutcome::skip(column_count_reason(f.size(), 6));
                     auto label = binary_label(f[5]);
                     if (!label) return RowOutcome::skip("bad is_duplicate '" + std::string(f[5]) + "'");
                     return RowOutcome{SentencePair{std::string(f[0]), std::string(f[3]),
                                                    std::string(f[4]), label},
                                       {}, false};
                   });
}

ParseResult parse_paws(std::istream& in, std::string_view split, const ParseOptions& options) {
  static const std::vector<std::string_view> header{"id", "sentence1", "sentence2", "label"};
  std::string name = "paws_qqp";
  if (!split.empty()) name += "/" + std::string(split);
  return parse_tsv(in, make_corpus(options, name, SourceFormat::paws),
                   options.has_header.value_or(true), header,
                   [](const std::vector<std::string_view>& f, std::size_t) {
                     if (f.size() != 4) return RowOutcome::skip(column_count_reason(f.size(), 4));
                     auto label = binary_label(f[3]);
                     if (!label) return RowOutcome::skip("bad label '" + std::string(f[3]) + "'");
                     return RowOutcome{SentencePair{std::string(f[0]), std::string(f[1]),
                                                    std::string(f[2]), label},
                                       {}, false};
                   });
}

ParseResult parse_mrpc(std::istream& in, const ParseOptions& options) {
  static const std::vector<std::string_view> header{"Quality", "#1 ID", "#2 ID", "#1 String",
                                                    "#2 String"};
  return parse_tsv(in, make_corpus(options, "mrpc", SourceFormat::mrpc),
                   options.has_header.value_or(true), header,
                   [](const std::vector<std::string_view>& f, std::size_t) {
                     if (f.size() != 5) return RowOutcome::skip(column_count_reason(f.size(), 5));
                     auto label = binary_label(f[0]);
                     if (!label) return RowOutcome::skip("bad Quality '" + std::string(f[0]) + "'");
                     std::string id = std::string(trim_spaces(f[1])) + "-" + std::string(trim_spaces(f[2]));
                     return RowOutcome{SentencePair{std::move(id), std::string(f[3]), std::string(f[4]), label},
                                       {}, false};
                   });
}

ParseResult parse_twitter_url(std::istream& in, const ParseOptions& options) {
  static const std::vector<std::string_view> header{"sentence1", "sentence2", "label"};
  return parse_tsv(in, make_corpus(options, "twitter_url", SourceFormat::twitter_url),
                   options.has_header.value_or(false), header,
                   [](const std::vector<std::string_view>& f, std::size_t line_no) {
                     // Some releases append the shared URL as a fourth column.
                     if (f.size() != 3 && f.size() != 4) {
                       return RowOutcome::skip(column_count_reason(f.size(), 3));
                     }
                     std::optional<TwitterLabel> vote;
                     try {
                       vote = TwitterLabel::parse(f[2]);
                     } catch (const FormatError& e) {
                       return RowOutcome::skip(e.what());
                     }
                     if (vote->is_neutral()) return RowOutcome::discarded();
                     return RowOutcome{SentencePair{std::to_string(line_no), std::string(f[0]),
                                                    std::string(f[1]), vote->label()},
                                       {}, false};
                   });
}

ParseResult parse_canonical(std::istream& in, const ParseOptions& options) {
  static const std::vector<std::string_view> header{"id", "s1", "s2", "label"};
  return parse_tsv(in, make_corpus(options, "canonical", SourceFormat::canonical),
                   options.has_header.value_or(true), header,
                   [](const std::vector<std::string_view>& f, std::size_t) {
                     if (f.size() != 4) return RowOutcome::skip(column_count_reason(f.size(), 4));
                     std::optional<Label> label;
                     if (f[3] != "-") {
                       label = binary_label(f[3]);
                       if (!label) return RowOutcome::skip("bad label '" + std::string(f[3]) + "'");
                     }
                     return RowOutcome{SentencePair{std::string(f[0]), std::string(f[1]),
                                                    std::string(f[2]), label},
                                       {}, false};
                   });
}

ParseResult parse(std::istream& in, SourceFormat format, const ParseOptions& options) {
  switch (format) {
    case SourceFormat::qqp: return parse_qqp(in, options);
    case SourceFormat::paws: return parse_paws(in, {}, options);
    case SourceFormat::mrpc: return parse_mrpc(in, options);
    case SourceFormat::twitter_url: return parse_twitter_url(in, options);
    case SourceFormat::canonical: return parse_canonical(in, options);
  }
  throw ConfigError("unknown corpus format");
}

ParseResult parse_file(const std::filesystem::path& path, SourceFormat format,
                       const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  ParseOptions opts = options;
  if (opts.name.empty()) opts.name = path.stem().string();
  return parse(in, format, opts);
}

void write_canonical(std::ostream& out, const Corpus& corpus, bool header) {
  auto check = [](std::string_view field, const std::string& id) {
    if (field.find_first_of("\t\n") != std::string_view::npos) {
      throw FormatError("field of pair '" + id + "' contains a tab or newline");
    }
  };
  if (header) out << "id\ts1\ts2\tlabel\n";
  for (const auto& p : corpus.pairs) {
    check(p.id, p.id);
    check(p.s1, p.id);
    check(p.s2, p.id);
    out << p.id << '\t' << p.s1 << '\t' << p.s2 << '\t';
    if (p.label) out << (*p.label == Label::paraphrase ? '1' : '0');
    else out << '-';
    out << '\n';
  }
}

std::vector<Sentence> distinct_sentences(const Corpus& corpus) {
  std::vector<Sentence> out;
  std::unordered_set<std::string_view> seen;
  for (const auto& p : corpus.pairs) {
    if (seen.insert(p.s1).second) out.push_back(p.s1);
    if (seen.insert(p.s2).second) out.push_back(p.s2);
  }
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.pairs = corpus.pairs.size();
  for (const auto& p : corpus.pairs) {
    if (!p.label) ++stats.unlabeled;
    else if (*p.label == Label::paraphrase) ++stats.paraphrase;
    else ++stats.non_paraphrase;
    if (p.s1 == p.s2) ++stats.self_pairs;
  }
  stats.distinct_sentences = distinct_sentences(corpus).size();
  return stats;
}

Corpus concat(std::string name, const std::vector<Corpus>& parts) {
  Corpus out;
  out.name = std::move(name);
  out.source_format = parts.empty() ? SourceFormat::canonical : parts.front().source_format;
  std::unordered_set<std::string> ids;
  for (const auto& part : parts) {
    if (part.source_format != out.source_format) out.source_format = SourceFormat::canonical;
    for (const auto& p : part.pairs) {
      if (!ids.insert(p.id).second) throw FormatError("duplicate pair id '" + p.id + "' in concat");
      out.pairs.push_back(p);
    }
  }
  return out;
}

}  // namespace paraprobe
