#include "paraprobe/scorer.hpp"

#include "paraprobe/error.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

namespace paraprobe {

Score::Score(double value) : value_(value) {
  if (std::isnan(value) || value < 0.0 || value > 1.0) {
    throw ProtocolError("score " + std::to_string(value) + " outside [0, 1]");
  }
}

Threshold::Threshold(double value) : value_(value) {
  if (std::isnan(value) || value < 0.0 || value > 1.0) {
    throw ConfigError("threshold " + std::to_string(value) + " outside [0, 1]");
  }
}

Label classify(Score score, Threshold threshold) {
  return score.value() > threshold.value() ? Label::paraphrase : Label::non_paraphrase;
}

Score Scorer::score(std::string_view s1, std::string_view s2) {
  const SentencePair pair{"0", std::string(s1), std::string(s2), std::nullopt};
  return score_batch(std::span<const SentencePair>(&pair, 1)).front();
}

std::vector<Score> BowScorer::score_batch(std::span<const SentencePair> pairs) {
  std::unordered_map<std::string_view, BowEncoding> cache;
  auto encoding = [&](const std::string& s) -> const BowEncoding& {
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, bow_encode(s, config_)).first;
    return it->second;
  };
  std::vector<Score> scores;
  scores.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto& a = encoding(p.s1);
    const auto& b = encoding(p.s2);
    scores.emplace_back(bow_cosine(a, b));
  }
  return scores;
}

std::vector<Score> FunctionScorer::score_batch(std::span<const SentencePair> pairs) {
  std::vector<Score> scores;
  scores.reserve(pairs.size());
  for (const auto& p : pairs) {
    try {
      scores.emplace_back(fn_(p.s1, p.s2));
    } catch (const ProtocolError& e) {
      throw ProtocolError(e.what(), p.id);
    }
  }
  return scores;
}

}  // namespace paraprobe
