#include "paraprobe/bow.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace paraprobe {

namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes consumed; invalid sequences consume one byte
};

constexpr char32_t kInvalid = 0xFFFFFFFF;

CodePoint decode_utf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
  else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
  else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
  else return {kInvalid, 1};
  if (pos + len > s.size()) return {kInvalid, 1};
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return {kInvalid, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

// Unicode White_Space property.
bool is_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
         cp == 0x205F || cp == 0x3000;
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  switch (cp) {
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
      return true;
    default:
      break;
  }
  return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x3008 && cp <= 0x3011);
}

// Start offset of the code point that ends at `end` (exclusive).
std::size_t previous_start(std::string_view s, std::size_t end) {
  std::size_t start = end - 1;
  while (start > 0 && end - start < 4 && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) {
    --start;
  }
  const auto cp = decode_utf8(s, start);
  return start + cp.length == end ? start : end - 1;
}

std::string_view strip_punctuation(std::string_view token) {
  while (!token.empty()) {
    const auto cp = decode_utf8(token, 0);
    if (cp.value == kInvalid || !is_punct(cp.value)) break;
    token.remove_prefix(cp.length);
  }
  while (!token.empty()) {
    const auto start = previous_start(token, token.size());
    const auto cp = decode_utf8(token, start);
    if (cp.value == kInvalid || !is_punct(cp.value)) break;
    token.remove_suffix(token.size() - start);
  }
  return token;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view sentence, const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  auto emit = [&](std::string_view raw) {
    if (config.strip_punctuation) raw = strip_punctuation(raw);
    if (raw.empty()) return;
    std::string token(raw);
    if (config.lowercase) {
      std::transform(token.begin(), token.end(), token.begin(), [](char c) {
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
      });
    }
    tokens.push_back(std::move(token));
  };

  std::size_t pos = 0;
  std::size_t token_start = 0;
  while (pos < sentence.size()) {
    const auto cp = decode_utf8(sentence, pos);
    if (cp.value != kInvalid && is_space(cp.value)) {
      emit(sentence.substr(token_start, pos - token_start));
      token_start = pos + cp.length;
    }
    pos += cp.length;
  }
  emit(sentence.substr(token_start));
  return tokens;
}

BowEncoding::BowEncoding(Counts counts) : counts_(std::move(counts)) {
  for (const auto& [gram, n] : counts_) squared_norm_ += n * n;
}

std::int64_t BowEncoding::count(const Gram& gram) const {
  auto it = counts_.find(gram);
  return it == counts_.end() ? 0 : it->second;
}

BowEncoding bow_encode(std::string_view sentence, const BowConfig& config) {
  const auto tokens = tokenize(sentence, config.tokenizer);
  BowEncoding::Counts counts;
  for (const auto& t : tokens) ++counts[Gram{1, t, {}}];
  if (config.bigrams) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) ++counts[Gram{2, tokens[i], tokens[i + 1]}];
  }
  if (config.binary) {
    for (auto& [gram, n] : counts) n = 1;
  }
  return BowEncoding(std::move(counts));
}

std::int64_t dot(const BowEncoding& a, const BowEncoding& b) {
  // Merge walk over both sorted maps.
  std::int64_t sum = 0;
  auto ia = a.counts().begin();
  auto ib = b.counts().begin();
  while (ia != a.counts().end() && ib != b.counts().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

double bow_cosine(const BowEncoding& a, const BowEncoding& b) {
  if (a.empty() || b.empty()) return 0.0;
  // Integer dot and norms keep the result symmetric and exact on identity.
  const double denom = std::sqrt(static_cast<double>(a.squared_norm()) *
                                 static_cast<double>(b.squared_norm()));
  return std::min(1.0, static_cast<double>(dot(a, b)) / denom);
}

double bow_score(std::string_view s1, std::string_view s2, const BowConfig& config) {
  return bow_cosine(bow_encode(s1, config), bow_encode(s2, config));
}

}  // namespace paraprobe
