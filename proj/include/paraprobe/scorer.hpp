#pragma once

#include "paraprobe/bow.hpp"
#include "paraprobe/corpus.hpp"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace paraprobe {

// A paraphrase score f(s1, s2) in [0, 1].
class Score {
public:
  // Throws ProtocolError for NaN or values outside [0, 1].
  explicit Score(double value);

  double value() const noexcept { return value_; }
  auto operator<=>(const Score&) const = default;

private:
  double value_;
};

// Classification cut-off in [0, 1]; default 0.5.
class Threshold {
public:
  // Throws ConfigError for NaN or values outside [0, 1].
  explicit Threshold(double value = 0.5);

  double value() const noexcept { return value_; }

private:
  double value_;
};

// Paraphrase iff score > threshold (strict).
Label classify(Score score, Threshold threshold);

class Scorer {
public:
  virtual ~Scorer() = default;

  // Short identifier used in reports ("bow", "external:...").
  virtual std::string name() const = 0;

  // One score per pair, aligned with `pairs`.
  virtual std::vector<Score> score_batch(std::span<const SentencePair> pairs) = 0;

  Score score(std::string_view s1, std::string_view s2);
};

inline std::vector<Score> score_batch(Scorer& scorer, std::span<const SentencePair> pairs) {
  return scorer.score_batch(pairs);
}

class BowScorer final : public Scorer {
public:
  explicit BowScorer(BowConfig config = {}) : config_(config) {}

  std::string name() const override { return "bow"; }
  std::vector<Score> score_batch(std::span<const SentencePair> pairs) override;

  const BowConfig& config() const noexcept { return config_; }

private:
  BowConfig config_;
};

// Wraps an in-process function; used for stubs and experiments.
class FunctionScorer final : public Scorer {
public:
  using Fn = std::function<double(std::string_view, std::string_view)>;

  FunctionScorer(Fn fn, std::string name = "function") : fn_(std::move(fn)), name_(std::move(name)) {}

  std::string name() const override { return name_; }
  std::vector<Score> score_batch(std::span<const SentencePair> pairs) override;

private:
  Fn fn_;
  std::string name_;
};

}  // namespace paraprobe
