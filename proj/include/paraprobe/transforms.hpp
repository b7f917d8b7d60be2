#pragma once

#include "paraprobe/corpus.hpp"

#include <cstddef>
#include <vector>

namespace paraprobe {

// Suffix appended to the id of every swapped pair.
inline constexpr std::string_view kReverseIdSuffix = ":rev";

// (s1, s2, y) -> (s2, s1, y) for every pair, ids suffixed with ":rev".
Corpus reverse_pairs(const Corpus& corpus);

// One (s, s, paraphrase) pair per distinct sentence, in first-occurrence order.
Corpus identical_pairs(const Corpus& corpus);

// corpus followed by reverse_pairs(corpus).
Corpus augment_reverse(const Corpus& corpus);

// corpus followed by identical_pairs(corpus).
Corpus augment_identical(const Corpus& corpus);

// All candidates (s, s') sharing the query s, compared against (s, s).
struct RankComparisonGroup {
  Sentence query;
  SentencePair identical_pair;
  // Each candidate keeps the gold label of the pair it came from.
  std::vector<SentencePair> candidates;
};

struct RankComparison {
  std::vector<RankComparisonGroup> groups;
  // Augmented pairs with s1 == s2 that were left out of the candidates.
  std::size_t excluded_self_pairs = 0;

  std::size_t candidate_count() const noexcept;
};

// Groups augment_reverse(corpus) by its byte-exact first sentence, in
// first-occurrence order.
RankComparison build_rank_comparison(const Corpus& corpus);

}  // namespace paraprobe
