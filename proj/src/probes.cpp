#include "paraprobe/probes.hpp"

#include "paraprobe/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace paraprobe {

std::string ScoreBook::key(std::string_view s1, std::string_view s2) {
  std::string k = std::to_string(s1.size());
  k += ':';
  k += s1;
  k += s2;
  return k;
}

void ScoreBook::insert(std::string_view s1, std::string_view s2, Score score) {
  scores_[key(s1, s2)] = score.value();
}

std::optional<Score> ScoreBook::find(std::string_view s1, std::string_view s2) const {
  auto it = scores_.find(key(s1, s2));
  if (it == scores_.end()) return std::nullopt;
  return Score(it->second);
}

Score ScoreBook::at(std::string_view s1, std::string_view s2) const {
  auto found = find(s1, s2);
  if (!found) throw PreconditionError("pair was not scored");
  return *found;
}

void ScoreBook::fill(Scorer& scorer, std::span<const SentencePair> pairs) {
  std::vector<SentencePair> missing;
  std::unordered_set<std::string> queued;
  std::unordered_set<std::string> ids;
  for (const auto& p : pairs) {
    auto k = key(p.s1, p.s2);
    if (scores_.contains(k) || !queued.insert(std::move(k)).second) continue;
    SentencePair q = p;
    // Request ids must be unique within a batch.
    for (std::size_t n = 1; !ids.insert(q.id).second; ++n) q.id = p.id + "#" + std::to_string(n);
    missing.push_back(std::move(q));
  }
  if (missing.empty()) return;
  auto scores = scorer.score_batch(missing);
  if (scores.size() != missing.size()) {
    throw ProtocolError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                        std::to_string(missing.size()) + " pairs");
  }
  for (std::size_t i = 0; i < missing.size(); ++i) insert(missing[i].s1, missing[i].s2, scores[i]);
}

ClassificationReport classification_from_labels(std::span<const Label> gold,
                                                std::span<const Label> predicted) {
  if (gold.size() != predicted.size()) {
    throw PreconditionError("gold and predicted label lists differ in length");
  }
  ClassificationReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] == Label::paraphrase;
    const bool p = predicted[i] == Label::paraphrase;
    if (g && p) ++r.counts.tp;
    else if (!g && p) ++r.counts.fp;
    else if (g && !p) ++r.counts.fn;
    else ++r.counts.tn;
  }
  const auto total = r.counts.total();
  if (total > 0) r.accuracy = static_cast<double>(r.counts.tp + r.counts.tn) / static_cast<double>(total);
  const auto denom = 2 * r.counts.tp + r.counts.fp + r.counts.fn;
  if (denom > 0) r.f1 = static_cast<double>(2 * r.counts.tp) / static_cast<double>(denom);
  return r;
}

ClassificationReport classification_metrics(const Corpus& corpus, const ScoreBook& scores,
                                            Threshold threshold) {
  std::vector<Label> gold;
  std::vector<Label> predicted;
  gold.reserve(corpus.size());
  predicted.reserve(corpus.size());
  for (const auto& p : corpus.pairs) {
    if (!p.label) throw PreconditionError("pair '" + p.id + "' has no gold label");
    gold.push_back(*p.label);
    predicted.push_back(classify(scores.at(p), threshold));
  }
  return classification_from_labels(gold, predicted);
}

ClassificationReport classification_metrics(const Corpus& corpus, Scorer& scorer,
                                            Threshold threshold) {
  for (const auto& p : corpus.pairs) {
    if (!p.label) throw PreconditionError("pair '" + p.id + "' has no gold label");
  }
  ScoreBook book;
  book.fill(scorer, corpus.pairs);
  return classification_metrics(corpus, book, threshold);
}

namespace {

void finish(RatioResult& r) {
  r.ratio = r.evaluated == 0 ? 0.0 : static_cast<double>(r.flagged) / static_cast<double>(r.evaluated);
}

}  // namespace

RatioResult reverse_disagreement(const Corpus& corpus, const ScoreBook& scores, Threshold threshold) {
  RatioResult r;
  for (const auto& p : corpus.pairs) {
    ++r.evaluated;
    const auto forward = classify(scores.at(p.s1, p.s2), threshold);
    const auto backward = classify(scores.at(p.s2, p.s1), threshold);
    if (forward != backward) {
      ++r.flagged;
      r.flagged_items.push_back(p.id);
    }
  }
  finish(r);
  return r;
}

RatioResult reverse_disagreement(const Corpus& corpus, Scorer& scorer, Threshold threshold) {
  ScoreBook book;
  book.fill(scorer, augment_reverse(corpus).pairs);
  return reverse_disagreement(corpus, book, threshold);
}

RatioResult identical_error_rate(const Corpus& corpus, const ScoreBook& scores, Threshold threshold) {
  RatioResult r;
  for (const auto& s : distinct_sentences(corpus)) {
    ++r.evaluated;
    if (classify(scores.at(s, s), threshold) == Label::non_paraphrase) {
      ++r.flagged;
      r.flagged_items.push_back(s);
    }
  }
  finish(r);
  return r;
}

RatioResult identical_error_rate(const Corpus& corpus, Scorer& scorer, Threshold threshold) {
  ScoreBook book;
  book.fill(scorer, identical_pairs(corpus).pairs);
  return identical_error_rate(corpus, book, threshold);
}

void fill_rank_scores(ScoreBook& book, Scorer& scorer, const RankComparison& comparison) {
  std::vector<SentencePair> pairs;
  pairs.reserve(comparison.groups.size() + comparison.candidate_count());
  for (const auto& g : comparison.groups) {
    pairs.push_back(g.identical_pair);
    pairs.insert(pairs.end(), g.candidates.begin(), g.candidates.end());
  }
  book.fill(scorer, pairs);
}

RankViolationReport rank_violations(const RankComparison& comparison, const ScoreBook& scores) {
  RankViolationReport r;
  r.groups = comparison.groups.size();
  r.excluded_self_pairs = comparison.excluded_self_pairs;
  double para_sum = 0.0;
  double nonpara_sum = 0.0;
  for (const auto& g : comparison.groups) {
    const double reference = scores.at(g.identical_pair).value();
    for (const auto& c : g.candidates) {
      if (!c.label) {
        ++r.unlabeled_candidates;
        continue;
      }
      const bool para = *c.label == Label::paraphrase;
      auto& stats = para ? r.paraphrase : r.non_paraphrase;
      ++stats.evaluated;
      const double diff = scores.at(c).value() - reference;
      if (diff > 0.0) {
        ++stats.violations;
        (para ? para_sum : nonpara_sum) += diff;
      }
    }
  }
  auto finish_stats = [](ViolationStats& s, double sum) {
    if (s.evaluated > 0) s.fraction = static_cast<double>(s.violations) / static_cast<double>(s.evaluated);
    if (s.violations > 0) s.avg_diff = sum / static_cast<double>(s.violations);
  };
  finish_stats(r.paraphrase, para_sum);
  finish_stats(r.non_paraphrase, nonpara_sum);
  return r;
}

RankViolationReport rank_violations(const RankComparison& comparison, Scorer& scorer) {
  ScoreBook book;
  fill_rank_scores(book, scorer, comparison);
  return rank_violations(comparison, book);
}

std::string_view to_string(PairCategory category) {
  switch (category) {
    case PairCategory::random: return "random";
    case PairCategory::paraphrase: return "paraphrase";
    case PairCategory::non_paraphrase: return "non-paraphrase";
    case PairCategory::identical: return "identical";
  }
  return "unknown";
}

BinEdges::BinEdges(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw ConfigError("histogram needs at least two bin edges");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (!std::isfinite(edges_[i])) throw ConfigError("histogram bin edges must be finite");
    if (i > 0 && !(edges_[i - 1] < edges_[i])) {
      throw ConfigError("histogram bin edges must be strictly ascending");
    }
  }
}

BinEdges BinEdges::uniform(double lo, double hi, std::size_t bins) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  if (!(lo < hi)) throw ConfigError("histogram range must satisfy lo < hi");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  edges.back() = hi;
  return BinEdges(std::move(edges));
}

std::size_t BinEdges::bin_of(double value) const {
  if (!(value >= lo() && value <= hi())) {
    throw PreconditionError("value " + std::to_string(value) + " outside histogram range");
  }
  if (value == hi()) return bins() - 1;
  auto it = std::upper_bound(edges_.begin(), edges_.end(), value);
  return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

std::size_t HistogramBins::total() const noexcept {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

HistogramBins make_histogram(PairCategory category, std::span<const double> values,
                             const BinEdges& edges) {
  HistogramBins h{category, edges.edges(), std::vector<std::size_t>(edges.bins(), 0)};
  for (double v : values) ++h.counts[edges.bin_of(v)];
  return h;
}

HistogramInputs histogram_inputs(const Corpus& corpus) {
  HistogramInputs in;
  in.random = augment_reverse(corpus);
  in.paraphrase.name = corpus.name + "+paraphrase";
  in.non_paraphrase.name = corpus.name + "+non_paraphrase";
  in.paraphrase.source_format = in.non_paraphrase.source_format = corpus.source_format;
  for (const auto& p : in.random.pairs) {
    if (!p.label) continue;
    (*p.label == Label::paraphrase ? in.paraphrase : in.non_paraphrase).pairs.push_back(p);
  }
  in.identical = identical_pairs(corpus);
  return in;
}

std::vector<HistogramBins> score_histogram(const HistogramInputs& inputs, const ScoreBook& scores,
                                           const BinEdges& edges) {
  if (edges.lo() > 0.0 || edges.hi() < 1.0) {
    throw ConfigError("score histogram edges must cover [0, 1]");
  }
  const std::pair<PairCategory, const Corpus*> categories[] = {
      {PairCategory::random, &inputs.random},
      {PairCategory::paraphrase, &inputs.paraphrase},
      {PairCategory::non_paraphrase, &inputs.non_paraphrase},
      {PairCategory::identical, &inputs.identical},
  };
  std::vector<HistogramBins> out;
  for (const auto& [category, corpus] : categories) {
    std::vector<double> values;
    values.reserve(corpus->size());
    for (const auto& p : corpus->pairs) values.push_back(scores.at(p).value());
    out.push_back(make_histogram(category, values, edges));
  }
  return out;
}

std::vector<HistogramBins> score_histogram(const HistogramInputs& inputs, Scorer& scorer,
                                           const BinEdges& edges) {
  ScoreBook book;
  book.fill(scorer, inputs.random.pairs);
  book.fill(scorer, inputs.identical.pairs);
  book.fill(scorer, inputs.paraphrase.pairs);
  book.fill(scorer, inputs.non_paraphrase.pairs);
  return score_histogram(inputs, book, edges);
}

std::vector<HistogramBins> score_difference_histogram(const RankComparison& comparison,
                                                      const ScoreBook& scores,
                                                      const BinEdges& edges) {
  if (edges.lo() > -1.0 || edges.hi() < 1.0) {
    throw ConfigError("score difference histogram edges must cover [-1, 1]");
  }
  std::vector<double> all, para, nonpara;
  for (const auto& g : comparison.groups) {
    const double reference = scores.at(g.identical_pair).value();
    for (const auto& c : g.candidates) {
      const double diff = scores.at(c).value() - reference;
      all.push_back(diff);
      if (c.label) (*c.label == Label::paraphrase ? para : nonpara).push_back(diff);
    }
  }
  return {make_histogram(PairCategory::random, all, edges),
          make_histogram(PairCategory::paraphrase, para, edges),
          make_histogram(PairCategory::non_paraphrase, nonpara, edges)};
}

}  // namespace paraprobe
