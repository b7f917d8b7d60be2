#pragma once

// Brute-force recomputation of every probe metric straight from a score
// function and the raw pairs. Shares no code with the library beyond the
// corpus types.

#include "paraprobe/corpus.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Fn = std::function<double(const std::string&, const std::string&)>;

struct Ratio {
  std::size_t flagged = 0;
  std::size_t evaluated = 0;
  double ratio() const { return evaluated == 0 ? 0.0 : double(flagged) / double(evaluated); }
};

struct Violations {
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  double diff_sum = 0.0;
  double fraction() const { return evaluated == 0 ? 0.0 : double(violations) / double(evaluated); }
  double avg_diff() const { return violations == 0 ? 0.0 : diff_sum / double(violations); }
};

struct Metrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  Ratio reverse;
  Ratio identical;
  Violations para;
  Violations non_para;
  // category name -> values, before binning
  std::map<std::string, std::vector<double>> score_values;
  std::map<std::string, std::vector<double>> diff_values;

  double accuracy() const {
    const auto n = tp + fp + tn + fn;
    return n == 0 ? 0.0 : double(tp + tn) / double(n);
  }
  double f1() const {
    const auto d = 2 * tp + fp + fn;
    return d == 0 ? 0.0 : double(2 * tp) / double(d);
  }
};

inline Metrics compute(const paraprobe::Corpus& corpus, const Fn& f, double t) {
  using paraprobe::Label;
  Metrics m;
  std::set<std::string> sentences;
  for (const auto& p : corpus.pairs) {
    sentences.insert(p.s1);
    sentences.insert(p.s2);
    const bool fwd = f(p.s1, p.s2) > t;
    const bool bwd = f(p.s2, p.s1) > t;
    if (p.label) {
      const bool gold = *p.label == Label::paraphrase;
      if (gold && fwd) ++m.tp;
      if (!gold && fwd) ++m.fp;
      if (!gold && !fwd) ++m.tn;
      if (gold && !fwd) ++m.fn;
    }
    ++m.reverse.evaluated;
    if (fwd != bwd) ++m.reverse.flagged;

    for (int order = 0; order < 2; ++order) {
      const auto& q = order == 0 ? p.s1 : p.s2;
      const auto& c = order == 0 ? p.s2 : p.s1;
      const double s = f(q, c);
      m.score_values["random"].push_back(s);
      if (p.label) m.score_values[*p.label == Label::paraphrase ? "paraphrase" : "non-paraphrase"].push_back(s);
      if (q == c) continue;
      const double diff = s - f(q, q);
      m.diff_values["random"].push_back(diff);
      if (!p.label) continue;
      auto& v = *p.label == Label::paraphrase ? m.para : m.non_para;
      m.diff_values[*p.label == Label::paraphrase ? "paraphrase" : "non-paraphrase"].push_back(diff);
      ++v.evaluated;
      if (diff > 0) {
        ++v.violations;
        v.diff_sum += diff;
      }
    }
  }
  for (const auto& s : sentences) {
    ++m.identical.evaluated;
    const double v = f(s, s);
    m.score_values["identical"].push_back(v);
    if (!(v > t)) ++m.identical.flagged;
  }
  return m;
}

// Linear scan; the final edge belongs to the last bin.
inline std::vector<std::size_t> bin(const std::vector<double>& values, const std::vector<double>& edges) {
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  for (double v : values) {
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const bool last = i + 2 == edges.size();
      if (v >= edges[i] && (v < edges[i + 1] || (last && v == edges[i + 1]))) {
        ++counts[i];
        break;
      }
    }
  }
  return counts;
}

}  // namespace oracle
