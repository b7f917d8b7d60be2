#include "paraprobe/transforms.hpp"

#include <string_view>
#include <unordered_map>

namespace paraprobe {

Corpus reverse_pairs(const Corpus& corpus) {
  Corpus out;
  out.name = corpus.name + "+reversed";
  out.source_format = corpus.source_format;
  out.pairs.reserve(corpus.pairs.size());
  for (const auto& p : corpus.pairs) {
    out.pairs.push_back({p.id + std::string(kReverseIdSuffix), p.s2, p.s1, p.label});
  }
  return out;
}

Corpus identical_pairs(const Corpus& corpus) {
  Corpus out;
  out.name = corpus.name + "+identical";
  out.source_format = corpus.source_format;
  std::size_t index = 0;
  for (auto& s : distinct_sentences(corpus)) {
    out.pairs.push_back({"same:" + std::to_string(index++), s, s, Label::paraphrase});
  }
  return out;
}

namespace {

Corpus append(const Corpus& head, Corpus&& tail, std::string name) {
  Corpus out;
  out.name = std::move(name);
  out.source_format = head.source_format;
  out.pairs = head.pairs;
  out.pairs.reserve(head.pairs.size() + tail.pairs.size());
  for (auto& p : tail.pairs) out.pairs.push_back(std::move(p));
  return out;
}

}  // namespace

Corpus augment_reverse(const Corpus& corpus) {
  return append(corpus, reverse_pairs(corpus), corpus.name + "+aug_reverse");
}

Corpus augment_identical(const Corpus& corpus) {
  return append(corpus, identical_pairs(corpus), corpus.name + "+aug_identical");
}

std::size_t RankComparison::candidate_count() const noexcept {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.candidates.size();
  return n;
}

RankComparison build_rank_comparison(const Corpus& corpus) {
  const Corpus augmented = augment_reverse(corpus);
  RankComparison result;
  std::unordered_map<std::string_view, std::size_t> group_of;

  for (const auto& p : augmented.pairs) {
    auto [it, inserted] = group_of.try_emplace(p.s1, result.groups.size());
    if (inserted) {
      RankComparisonGroup group;
      group.query = p.s1;
      group.identical_pair = {"query:" + std::to_string(result.groups.size()), p.s1, p.s1,
                              Label::paraphrase};
      result.groups.push_back(std::move(group));
    }
    if (p.s1 == p.s2) {
      ++result.excluded_self_pairs;
      continue;
    }
    result.groups[it->second].candidates.push_back(p);
  }
  return result;
}

}  // namespace paraprobe
