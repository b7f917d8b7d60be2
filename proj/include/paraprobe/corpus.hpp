#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paraprobe {

enum class Label { non_paraphrase = 0, paraphrase = 1 };

enum class SourceFormat { qqp, paws, mrpc, twitter_url, canonical };

std::string_view to_string(Label label);
std::string_view to_string(SourceFormat format);
SourceFormat parse_source_format(std::string_view name);

// Sentences are kept byte-exact as read; only the record delimiter (and a
// trailing '\r') is removed.
using Sentence = std::string;

struct SentencePair {
  std::string id;
  Sentence s1;
  Sentence s2;
  std::optional<Label> label;

  bool operator==(const SentencePair&) const = default;
};

struct Corpus {
  std::string name;
  std::vector<SentencePair> pairs;
  SourceFormat source_format = SourceFormat::canonical;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }

  bool operator==(const Corpus&) const = default;
};

// Annotator vote of the Twitter URL corpus, "(agree, total)".
class TwitterLabel {
public:
  static constexpr int kAnnotators = 6;

  // Throws FormatError unless 0 <= agree <= total == 6.
  TwitterLabel(int agree, int total);

  // Parses "(k, 6)"; whitespace around the numbers is tolerated.
  static TwitterLabel parse(std::string_view field);

  int agree() const noexcept { return agree_; }
  int total() const noexcept { return total_; }

  // Three of six is the neutral vote that gets dropped; >= 4 is a
  // paraphrase and <= 2 is not.
  bool is_neutral() const noexcept { return agree_ == 3; }
  std::optional<Label> label() const noexcept;

private:
  int agree_;
  int total_;
};

struct SkippedRow {
  std::size_t line;  // 1-based line number in the input stream
  std::string reason;

  bool operator==(const SkippedRow&) const = default;
};

// Accounting for one parse. For every parser
//   emitted + skipped.size() + discarded == data_rows
// where data_rows counts every line after the header.
struct ParseTally {
  std::size_t data_rows = 0;
  std::size_t emitted = 0;
  std::size_t discarded = 0;
  std::vector<SkippedRow> skipped;

  std::size_t rows_skipped() const noexcept { return skipped.size(); }
  bool operator==(const ParseTally&) const = default;
};

struct ParseResult {
  Corpus corpus;
  ParseTally tally;

  bool operator==(const ParseResult&) const = default;
};

struct ParseOptions {
  // nullopt selects the published layout of the format: QQP, PAWS, MRPC and
  // canonical files carry a header row, the Twitter URL corpus does not.
  std::optional<bool> has_header;
  // Corpus name; empty picks a per-format default.
  std::string name;
};

ParseResult parse_qqp(std::istream& in, const ParseOptions& options = {});
// split ("train", "dev", "test", ...) is recorded in the corpus name.
ParseResult parse_paws(std::istream& in, std::string_view split = {},
                       const ParseOptions& options = {});
ParseResult parse_mrpc(std::istream& in, const ParseOptions& options = {});
ParseResult parse_twitter_url(std::istream& in, const ParseOptions& options = {});
ParseResult parse_canonical(std::istream& in, const ParseOptions& options = {});

ParseResult parse(std::istream& in, SourceFormat format, const ParseOptions& options = {});
// Throws IoError if the file cannot be opened.
ParseResult parse_file(const std::filesystem::path& path, SourceFormat format,
                       const ParseOptions& options = {});

// Canonical TSV: "id\ts1\ts2\tlabel" with label in {0,1,-}. Throws
// FormatError for fields containing a tab or newline.
void write_canonical(std::ostream& out, const Corpus& corpus, bool header = true);

// Every sentence that occurs as s1 or s2, once, in first-occurrence order.
std::vector<Sentence> distinct_sentences(const Corpus& corpus);

struct CorpusStats {
  std::size_t pairs = 0;
  std::size_t paraphrase = 0;
  std::size_t non_paraphrase = 0;
  std::size_t unlabeled = 0;
  std::size_t distinct_sentences = 0;
  std::size_t self_pairs = 0;  // s1 == s2 byte-exact
};

CorpusStats corpus_stats(const Corpus& corpus);

// Appends the pairs of `parts` in order. Throws FormatError on id clashes.
Corpus concat(std::string name, const std::vector<Corpus>& parts);

}  // namespace paraprobe
