#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace paraprobe {

struct TokenizerConfig {
  // ASCII case folding; other bytes pass through unchanged.
  bool lowercase = true;
  // Strip leading/trailing punctuation from every token.
  bool strip_punctuation = true;
};

// Splits on Unicode whitespace (UTF-8 decoded), then applies the folding and
// stripping rules of `config`. Empty tokens are dropped.
std::vector<std::string> tokenize(std::string_view sentence, const TokenizerConfig& config = {});

struct BowConfig {
  TokenizerConfig tokenizer;
  // Clamp every count to 1.
  bool binary = false;
  bool bigrams = true;
};

// A unigram or an adjacent-token bigram. Unigrams leave `second` empty.
struct Gram {
  std::uint8_t order = 1;
  std::string first;
  std::string second;

  auto operator<=>(const Gram&) const = default;
};

// Joint unigram + bigram count vector of one sentence.
class BowEncoding {
public:
  using Counts = std::map<Gram, std::int64_t>;

  BowEncoding() = default;
  explicit BowEncoding(Counts counts);

  const Counts& counts() const noexcept { return counts_; }
  bool empty() const noexcept { return counts_.empty(); }
  std::int64_t count(const Gram& gram) const;
  std::int64_t squared_norm() const noexcept { return squared_norm_; }

private:
  Counts counts_;
  std::int64_t squared_norm_ = 0;
};

BowEncoding bow_encode(std::string_view sentence, const BowConfig& config = {});

// Integer dot product of two encodings.
std::int64_t dot(const BowEncoding& a, const BowEncoding& b);

// Cosine similarity of the encodings, 0 when either is empty. Exactly
// symmetric, exactly 1 for identical nonempty encodings, never above 1.
double bow_cosine(const BowEncoding& a, const BowEncoding& b);
double bow_score(std::string_view s1, std::string_view s2, const BowConfig& config = {});

}  // namespace paraprobe
