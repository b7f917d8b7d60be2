#include "paraprobe/transforms.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <tuple>

#include "generators.hpp"

using namespace paraprobe;

namespace {

using Triple = std::tuple<std::string, std::string, std::optional<Label>>;

std::vector<Triple> content(const Corpus& c) {
  std::vector<Triple> out;
  for (const auto& p : c.pairs) out.emplace_back(p.s1, p.s2, p.label);
  return out;
}

std::vector<Triple> sorted_content(const Corpus& c) {
  auto v = content(c);
  std::sort(v.begin(), v.end());
  return v;
}

Corpus make(std::vector<SentencePair> pairs) {
  Corpus c;
  c.name = "t";
  c.pairs = std::move(pairs);
  return c;
}

}  // namespace

TEST_SUITE("transforms") {

TEST_CASE("reverse_pairs swaps and suffixes ids") {
  auto r = reverse_pairs(make({{"1", "a", "b", Label::paraphrase}}));
  REQUIRE(r.size() == 1);
  CHECK(r.pairs[0] == SentencePair{"1:rev", "b", "a", Label::paraphrase});
  CHECK(reverse_pairs(make({})).empty());
}

TEST_CASE("reverse_pairs is an involution on content") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    auto c = testgen::random_corpus(rng, 20);
    CHECK(content(reverse_pairs(reverse_pairs(c))) == content(c));
  }
}

TEST_CASE("identical_pairs") {
  auto r = identical_pairs(make({{"1", "a", "b", Label::non_paraphrase}}));
  REQUIRE(r.size() == 2);
  CHECK(content(r) == std::vector<Triple>{{"a", "a", Label::paraphrase}, {"b", "b", Label::paraphrase}});
  CHECK(content(identical_pairs(make({{"1", "a", "a", Label::paraphrase}}))) ==
        std::vector<Triple>{{"a", "a", Label::paraphrase}});
}

TEST_CASE("augment_reverse doubles and keeps original ids") {
  auto c = make({{"1", "a", "b", Label::paraphrase},
                 {"2", "c", "c", Label::non_paraphrase},
                 {"3", "d", "a", Label::paraphrase}});
  auto aug = augment_reverse(c);
  CHECK(aug.size() == 6);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(aug.pairs[i] == c.pairs[i]);
  // self-pair duplicated, not dropped
  CHECK(std::count_if(aug.pairs.begin(), aug.pairs.end(),
                      [](const SentencePair& p) { return p.s1 == "c" && p.s2 == "c"; }) == 2);
  auto paraphrases = std::count_if(aug.pairs.begin(), aug.pairs.end(),
                                   [](const SentencePair& p) { return p.label == Label::paraphrase; });
  CHECK(paraphrases == 4);
}

TEST_CASE("augment_reverse is invariant under pre-reversal (multiset)") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    auto c = testgen::random_corpus(rng, 20);
    CHECK(sorted_content(augment_reverse(c)) == sorted_content(augment_reverse(reverse_pairs(c))));
  }
}

TEST_CASE("augment_identical") {
  auto aug = augment_identical(make({{"1", "a", "b", Label::non_paraphrase}}));
  CHECK(content(aug) == std::vector<Triple>{{"a", "b", Label::non_paraphrase},
                                            {"a", "a", Label::paraphrase},
                                            {"b", "b", Label::paraphrase}});
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    auto c = testgen::random_corpus(rng, 20);
    auto a = augment_identical(c);
    CHECK(a.size() == c.size() + distinct_sentences(c).size());
    for (std::size_t k = c.size(); k < a.size(); ++k) CHECK(a.pairs[k].label == Label::paraphrase);
  }
}

TEST_CASE("rank comparison groups over both orders") {
  auto rc = build_rank_comparison(make({{"1", "a", "b", Label::paraphrase}}));
  REQUIRE(rc.groups.size() == 2);
  CHECK(rc.groups[0].query == "a");
  CHECK(rc.groups[0].candidates.size() == 1);
  CHECK(rc.groups[0].candidates[0].s2 == "b");
  CHECK(rc.groups[1].query == "b");
  CHECK(rc.groups[1].candidates[0].s2 == "a");
  CHECK(rc.groups[1].candidates[0].label == Label::paraphrase);
}

TEST_CASE("self-pairs are excluded from candidates but keep their group") {
  auto rc = build_rank_comparison(make({{"1", "a", "a", Label::paraphrase}}));
  REQUIRE(rc.groups.size() == 1);
  CHECK(rc.groups[0].candidates.empty());
  CHECK(rc.excluded_self_pairs == 2);
}

TEST_CASE("rank comparison invariants (property)") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 200; ++i) {
    auto c = testgen::random_corpus(rng, 20);
    auto rc = build_rank_comparison(c);
    auto aug = augment_reverse(c);
    std::size_t self = 0;
    std::vector<Triple> expected;
    for (const auto& p : aug.pairs) {
      if (p.s1 == p.s2) ++self;
      else expected.emplace_back(p.s1, p.s2, p.label);
    }
    CHECK(rc.excluded_self_pairs == self);
    CHECK(rc.candidate_count() == 2 * c.size() - self);

    std::vector<Triple> got;
    for (const auto& g : rc.groups) {
      CHECK(g.identical_pair.s1 == g.query);
      CHECK(g.identical_pair.s2 == g.query);
      CHECK(g.identical_pair.label == Label::paraphrase);
      for (const auto& cand : g.candidates) {
        CHECK(cand.s1 == g.query);
        CHECK(cand.s2 != g.query);
        got.emplace_back(cand.s1, cand.s2, cand.label);
      }
    }
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    CHECK(got == expected);
  }
}

}  // TEST_SUITE
