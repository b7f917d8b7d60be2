#pragma once

#include "paraprobe/corpus.hpp"
#include "paraprobe/scorer.hpp"
#include "paraprobe/transforms.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace paraprobe {

// Scores keyed by the ordered sentence pair (s1, s2). Probes read from a
// book; filling it is the only place a Scorer is called, so each ordered
// pair is scored at most once per run.
class ScoreBook {
public:
  // Scores every pair whose (s1, s2) is not yet present, in one batch.
  void fill(Scorer& scorer, std::span<const SentencePair> pairs);
  void insert(std::string_view s1, std::string_view s2, Score score);

  std::optional<Score> find(std::string_view s1, std::string_view s2) const;
  // Throws PreconditionError if the pair was never scored.
  Score at(std::string_view s1, std::string_view s2) const;
  Score at(const SentencePair& pair) const { return at(pair.s1, pair.s2); }

  std::size_t size() const noexcept { return scores_.size(); }

private:
  static std::string key(std::string_view s1, std::string_view s2);
  std::unordered_map<std::string, double> scores_;
};

// ---- classification (accuracy / F1, paraphrase is the positive class) ----

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct ClassificationReport {
  double accuracy = 0.0;
  double f1 = 0.0;  // 2tp / (2tp + fp + fn), 0 when the denominator is 0
  ConfusionCounts counts;
};

ClassificationReport classification_from_labels(std::span<const Label> gold,
                                                 std::span<const Label> predicted);
// Throws PreconditionError if any pair is unlabeled.
ClassificationReport classification_metrics(const Corpus& corpus, const ScoreBook& scores,
                                            Threshold threshold);
ClassificationReport classification_metrics(const Corpus& corpus, Scorer& scorer,
                                            Threshold threshold);

// ---- symmetry probes ----

// flagged / evaluated; 0 with evaluated == 0 on empty input.
struct RatioResult {
  double ratio = 0.0;
  std::size_t flagged = 0;
  std::size_t evaluated = 0;
  // Pair ids (reverse probe) or sentences (identical probe).
  std::vector<std::string> flagged_items;
};

// Pairs whose label flips when s1 and s2 are swapped. Gold labels unused.
RatioResult reverse_disagreement(const Corpus& corpus, const ScoreBook& scores, Threshold threshold);
RatioResult reverse_disagreement(const Corpus& corpus, Scorer& scorer, Threshold threshold);

// Share of identical_pairs(corpus) classified as non-paraphrase.
RatioResult identical_error_rate(const Corpus& corpus, const ScoreBook& scores, Threshold threshold);
RatioResult identical_error_rate(const Corpus& corpus, Scorer& scorer, Threshold threshold);

struct AsymmetryReport {
  RatioResult reverse;
  RatioResult identical;
};

// ---- rank violations: f(s, s') > f(s, s) ----

struct ViolationStats {
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  double fraction = 0.0;
  // Mean of f(s, s') - f(s, s) over violating candidates only; 0 if none.
  double avg_diff = 0.0;
};

struct RankViolationReport {
  ViolationStats paraphrase;
  ViolationStats non_paraphrase;
  std::size_t groups = 0;
  std::size_t unlabeled_candidates = 0;
  std::size_t excluded_self_pairs = 0;
};

// Scores every query's identical pair and every candidate.
void fill_rank_scores(ScoreBook& book, Scorer& scorer, const RankComparison& comparison);

RankViolationReport rank_violations(const RankComparison& comparison, const ScoreBook& scores);
RankViolationReport rank_violations(const RankComparison& comparison, Scorer& scorer);

// ---- histograms ----

enum class PairCategory { random, paraphrase, non_paraphrase, identical };
std::string_view to_string(PairCategory category);

// Strictly ascending bin edges. Bin i is [edges[i], edges[i+1]); the last
// bin also holds values equal to the final edge.
class BinEdges {
public:
  // Throws ConfigError for fewer than two edges or non-ascending edges.
  explicit BinEdges(std::vector<double> edges);
  static BinEdges uniform(double lo, double hi, std::size_t bins);

  const std::vector<double>& edges() const noexcept { return edges_; }
  std::size_t bins() const noexcept { return edges_.size() - 1; }
  double lo() const noexcept { return edges_.front(); }
  double hi() const noexcept { return edges_.back(); }
  // Throws PreconditionError for values outside [lo, hi].
  std::size_t bin_of(double value) const;

private:
  std::vector<double> edges_;
};

inline constexpr std::size_t kDefaultBins = 50;

struct HistogramBins {
  PairCategory category = PairCategory::random;
  std::vector<double> edges;
  std::vector<std::size_t> counts;

  std::size_t total() const noexcept;
};

HistogramBins make_histogram(PairCategory category, std::span<const double> values,
                             const BinEdges& edges);

// Categories: random = both-order dataset pairs; paraphrase and
// non-paraphrase = label-filtered subsets of random; identical =
// identical_pairs(corpus).
struct HistogramInputs {
  Corpus random;
  Corpus paraphrase;
  Corpus non_paraphrase;
  Corpus identical;
};

HistogramInputs histogram_inputs(const Corpus& corpus);

// Score histograms, one per category. Edges must cover [0, 1].
std::vector<HistogramBins> score_histogram(const HistogramInputs& inputs, const ScoreBook& scores,
                                           const BinEdges& edges);
std::vector<HistogramBins> score_histogram(const HistogramInputs& inputs, Scorer& scorer,
                                           const BinEdges& edges);

// Per-candidate f(s, s') - f(s, s) for the random, paraphrase and
// non-paraphrase categories. Edges must cover [-1, 1].
std::vector<HistogramBins> score_difference_histogram(const RankComparison& comparison,
                                                      const ScoreBook& scores,
                                                      const BinEdges& edges);

}  // namespace paraprobe
