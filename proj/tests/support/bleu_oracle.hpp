#pragma once

// Brute-force corpus BLEU: n-grams kept as token vectors in an ordered map,
// counts found by scanning every window. Shares no code with src/metrics.cpp.

#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace radnmt::testing {

using Sentence = std::vector<std::string>;

inline std::map<Sentence, long> oracle_ngrams(const Sentence& s, std::size_t n) {
  std::map<Sentence, long> out;
  if (s.size() < n) return out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    out[Sentence(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i + n))]++;
  }
  return out;
}

/// Cumulative BLEU-1..max_n over a corpus; refs[i] are the references of line i.
inline std::vector<double> oracle_bleu(const std::vector<Sentence>& hyps,
                                       const std::vector<std::vector<Sentence>>& refs,
                                       std::size_t max_n) {
  std::vector<double> num(max_n, 0.0), den(max_n, 0.0);
  double c = 0.0, r = 0.0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    c += static_cast<double>(hyps[i].size());
    double best = 1e300;
    for (const auto& ref : refs[i]) {
      const double len = static_cast<double>(ref.size());
      const double gap = std::abs(len - static_cast<double>(hyps[i].size()));
      const double best_gap = std::abs(best - static_cast<double>(hyps[i].size()));
      if (gap < best_gap || (gap == best_gap && len < best)) best = len;
    }
    r += best;
    for (std::size_t n = 1; n <= max_n; ++n) {
      for (const auto& [gram, count] : oracle_ngrams(hyps[i], n)) {
        long clip = 0;
        for (const auto& ref : refs[i]) {
          const auto ref_counts = oracle_ngrams(ref, n);
          const auto it = ref_counts.find(gram);
          if (it != ref_counts.end() && it->second > clip) clip = it->second;
        }
        num[n - 1] += static_cast<double>(std::min(count, clip));
        den[n - 1] += static_cast<double>(count);
      }
    }
  }
  const double bp = c == 0.0 ? 0.0 : (c >= r ? 1.0 : std::exp(1.0 - r / c));
  std::vector<double> out;
  for (std::size_t k = 1; k <= max_n; ++k) {
    double logs = 0.0;
    bool zero = false;
    for (std::size_t n = 1; n <= k; ++n) {
      if (num[n - 1] == 0.0 || den[n - 1] == 0.0) {
        zero = true;
        break;
      }
      logs += std::log(num[n - 1] / den[n - 1]);
    }
    out.push_back(zero ? 0.0 : bp * std::exp(logs / static_cast<double>(k)));
  }
  return out;
}

/// Small random corpus over a 4-letter alphabet so that n-gram matches occur.
struct MicroCorpus {
  std::vector<Sentence> hyps;
  std::vector<std::vector<Sentence>> refs;  // per line
};

inline MicroCorpus random_micro_corpus(std::mt19937_64& rng) {
  static const char* alphabet[] = {"a", "b", "c", "d"};
  std::uniform_int_distribution<int> lines(1, 6), length(1, 9), refs(1, 4), letter(0, 3);
  const auto sentence = [&] {
    Sentence s;
    const int n = length(rng);
    for (int i = 0; i < n; ++i) s.emplace_back(alphabet[letter(rng)]);
    return s;
  };
  MicroCorpus out;
  const int n_lines = lines(rng);
  const int n_refs = refs(rng);
  for (int i = 0; i < n_lines; ++i) {
    out.hyps.push_back(sentence());
    std::vector<Sentence> line;
    for (int k = 0; k < n_refs; ++k) line.push_back(sentence());
    out.refs.push_back(std::move(line));
  }
  return out;
}

}  // namespace radnmt::testing
