#include "radnmt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "radnmt/error.hpp"
#include "radnmt/utf8.hpp"

namespace radnmt {

namespace {

using NgramCounts = std::unordered_map<std::string, std::int64_t>;

std::string join(const Tokens& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += tokens[i];
  }
  return out;
}

NgramCounts count_ngrams(const Tokens& tokens, int n) {
  NgramCounts counts;
  const auto len = tokens.size();
  const auto order = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + order <= len; ++i) ++counts[join(tokens, i, i + order)];
  return counts;
}

Tokens normalize(const Tokens& tokens, const EvalOptions& options) {
  if (!options.case_insensitive) return tokens;
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(utf8::ascii_lower(t));
  return out;
}

struct PreparedCorpus {
  std::vector<Tokens> hyps;
  std::vector<std::vector<Tokens>> refs;
};

PreparedCorpus prepare(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs,
                       const EvalOptions& options) {
  if (hypotheses.empty()) throw InputError("empty hypothesis corpus");
  if (hypotheses.size() != refs.size()) {
    throw InputError("hypothesis has " + std::to_string(hypotheses.size()) +
                     " lines but references have " + std::to_string(refs.size()));
  }
  PreparedCorpus out;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    if (refs.lines[i].empty()) {
      throw InputError("line " + std::to_string(i + 1) + " has no reference");
    }
    out.hyps.push_back(normalize(hypotheses[i], options));
    std::vector<Tokens> line_refs;
    for (const auto& r : refs.lines[i]) line_refs.push_back(normalize(r, options));
    out.refs.push_back(std::move(line_refs));
  }
  return out;
}

// Characters of the words joined by single spaces.
std::vector<std::string> joined_characters(const Tokens& words) {
  std::vector<std::string> chars;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) chars.emplace_back(" ");
    for (auto& c : utf8::split_scalars(words[i])) chars.push_back(std::move(c));
  }
  return chars;
}

bool contains_phrase(const Tokens& haystack, const Tokens& words, std::size_t begin,
                     std::size_t len) {
  if (len > haystack.size()) return false;
  for (std::size_t j = 0; j + len <= haystack.size(); ++j) {
    if (std::equal(words.begin() + static_cast<std::ptrdiff_t>(begin),
                   words.begin() + static_cast<std::ptrdiff_t>(begin + len),
                   haystack.begin() + static_cast<std::ptrdiff_t>(j))) {
      return true;
    }
  }
  return false;
}

// Moves words[begin, begin+len) so that it starts at `dest` in the result.
Tokens shifted(const Tokens& words, std::size_t begin, std::size_t len, std::size_t dest) {
  Tokens rest;
  rest.reserve(words.size());
  rest.insert(rest.end(), words.begin(), words.begin() + static_cast<std::ptrdiff_t>(begin));
  rest.insert(rest.end(), words.begin() + static_cast<std::ptrdiff_t>(begin + len), words.end());
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(dest),
              words.begin() + static_cast<std::ptrdiff_t>(begin),
              words.begin() + static_cast<std::ptrdiff_t>(begin + len));
  return rest;
}

}  // namespace

ReferenceSet ReferenceSet::from_corpora(const std::vector<std::vector<Tokens>>& corpora) {
  if (corpora.empty()) throw InputError("at least one reference corpus is required");
  ReferenceSet set;
  set.lines.resize(corpora.front().size());
  for (std::size_t k = 0; k < corpora.size(); ++k) {
    if (corpora[k].size() != set.lines.size()) {
      throw InputError("reference " + std::to_string(k + 1) + " has " +
                       std::to_string(corpora[k].size()) + " lines, expected " +
                       std::to_string(set.lines.size()));
    }
    for (std::size_t i = 0; i < set.lines.size(); ++i) set.lines[i].push_back(corpora[k][i]);
  }
  return set;
}

ReferenceSet ReferenceSet::single(std::size_t k) const {
  ReferenceSet out;
  for (const auto& line : lines) {
    if (k >= line.size()) throw InputError("reference index out of range");
    out.lines.push_back({line[k]});
  }
  return out;
}

std::size_t ReferenceSet::reference_count() const {
  if (lines.empty()) return 0;
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& line : lines) n = std::min(n, line.size());
  return n;
}

std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

MetricScore bleu(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs, int max_n,
                 const EvalOptions& options) {
  if (max_n < 1) throw InputError("BLEU order must be positive");
  const auto corpus = prepare(hypotheses, refs, options);
  const auto orders = static_cast<std::size_t>(max_n);
  std::vector<std::int64_t> matched(orders, 0), total(orders, 0);
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;
  for (std::size_t i = 0; i < corpus.hyps.size(); ++i) {
    const auto& hyp = corpus.hyps[i];
    const auto c = static_cast<std::int64_t>(hyp.size());
    hyp_len += c;
    std::int64_t closest = -1;
    for (const auto& ref : corpus.refs[i]) {
      const auto r = static_cast<std::int64_t>(ref.size());
      if (closest < 0 || std::abs(r - c) < std::abs(closest - c) ||
          (std::abs(r - c) == std::abs(closest - c) && r < closest)) {
        closest = r;
      }
    }
    ref_len += closest;
    for (int n = 1; n <= max_n; ++n) {
      const auto hyp_counts = count_ngrams(hyp, n);
      NgramCounts max_ref;
      for (const auto& ref : corpus.refs[i]) {
        for (const auto& [gram, count] : count_ngrams(ref, n)) {
          auto& slot = max_ref[gram];
          slot = std::max(slot, count);
        }
      }
      const auto k = static_cast<std::size_t>(n - 1);
      for (const auto& [gram, count] : hyp_counts) {
        const auto it = max_ref.find(gram);
        if (it != max_ref.end()) matched[k] += std::min(count, it->second);
        total[k] += count;
      }
    }
  }

  MetricScore score;
  score.name = "BLEU";
  score.reference_count = refs.reference_count();
  const double bp = hyp_len == 0 ? 0.0
                                 : std::exp(std::min(0.0, 1.0 - static_cast<double>(ref_len) /
                                                              static_cast<double>(hyp_len)));
  score.details["brevity_penalty"] = bp;
  score.details["hyp_length"] = static_cast<double>(hyp_len);
  score.details["ref_length"] = static_cast<double>(ref_len);
  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t k = 0; k < orders; ++k) {
    const double p = total[k] == 0 ? 0.0
                                   : static_cast<double>(matched[k]) / static_cast<double>(total[k]);
    score.details["precision_" + std::to_string(k + 1)] = p;
    if (p == 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
    score.breakdown.push_back(zero ? 0.0 : bp * std::exp(log_sum / static_cast<double>(k + 1)));
  }
  score.value = score.breakdown.back();
  return score;
}

MetricScore nist(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs, int max_n,
                 const EvalOptions& options) {
  if (max_n < 1) throw InputError("NIST order must be positive");
  const auto corpus = prepare(hypotheses, refs, options);

  // Reference statistics for the information weights.
  NgramCounts ref_counts;
  std::int64_t ref_words = 0;
  for (const auto& line : corpus.refs) {
    for (const auto& ref : line) {
      ref_words += static_cast<std::int64_t>(ref.size());
      for (int n = 1; n <= max_n; ++n) {
        for (const auto& [gram, count] : count_ngrams(ref, n)) ref_counts[gram] += count;
      }
    }
  }
  const auto info = [&](const std::string& gram, int n) {
    const double count = static_cast<double>(ref_counts.at(gram));
    double context = static_cast<double>(ref_words);
    if (n > 1) context = static_cast<double>(ref_counts.at(gram.substr(0, gram.rfind(' '))));
    return std::log2(context / count);
  };

  const auto orders = static_cast<std::size_t>(max_n);
  std::vector<double> info_sum(orders, 0.0);
  std::vector<std::int64_t> hyp_grams(orders, 0);
  std::int64_t hyp_words = 0;
  double avg_ref_words = 0.0;
  for (std::size_t i = 0; i < corpus.hyps.size(); ++i) {
    const auto& hyp = corpus.hyps[i];
    hyp_words += static_cast<std::int64_t>(hyp.size());
    double line_ref = 0.0;
    for (const auto& ref : corpus.refs[i]) line_ref += static_cast<double>(ref.size());
    avg_ref_words += line_ref / static_cast<double>(corpus.refs[i].size());
    for (int n = 1; n <= max_n; ++n) {
      NgramCounts max_ref;
      for (const auto& ref : corpus.refs[i]) {
        for (const auto& [gram, count] : count_ngrams(ref, n)) {
          auto& slot = max_ref[gram];
          slot = std::max(slot, count);
        }
      }
      const auto k = static_cast<std::size_t>(n - 1);
      for (const auto& [gram, count] : count_ngrams(hyp, n)) {
        hyp_grams[k] += count;
        const auto it = max_ref.find(gram);
        if (it == max_ref.end()) continue;
        info_sum[k] += info(gram, n) * static_cast<double>(std::min(count, it->second));
      }
    }
  }

  MetricScore score;
  score.name = "NIST";
  score.reference_count = refs.reference_count();
  const double ratio = avg_ref_words > 0.0 ? static_cast<double>(hyp_words) / avg_ref_words : 0.0;
  double penalty = 1.0;
  if (ratio <= 0.0) {
    penalty = 0.0;
  } else if (ratio < 1.0) {
    const double beta = std::log(0.5) / std::pow(std::log(2.0 / 3.0), 2.0);
    penalty = std::exp(beta * std::pow(std::log(ratio), 2.0));
  }
  score.details["brevity_factor"] = penalty;
  score.details["hyp_length"] = static_cast<double>(hyp_words);
  score.details["ref_length"] = avg_ref_words;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < orders; ++k) {
    const double part = info_sum[k] / static_cast<double>(std::max<std::int64_t>(hyp_grams[k], 1));
    score.details["info_" + std::to_string(k + 1)] = part;
    cumulative += part;
    score.breakdown.push_back(cumulative * penalty);
  }
  score.value = score.breakdown.back();
  return score;
}

double character_sentence(const Tokens& hypothesis, const Tokens& reference,
                          const CharacterOptions& options) {
  if (hypothesis.empty()) return reference.empty() ? 0.0 : 1.0;
  Tokens hyp = hypothesis;
  std::size_t shifts = 0;
  std::size_t current = edit_distance(hyp, reference);
  while (current > 0) {
    std::size_t best_cost = current;
    Tokens best;
    for (std::size_t begin = 0; begin < hyp.size(); ++begin) {
      for (std::size_t len = 1; len <= options.max_shift_phrase && begin + len <= hyp.size(); ++len) {
        if (!contains_phrase(reference, hyp, begin, len)) break;
        const std::size_t slots = hyp.size() - len;
        for (std::size_t dest = 0; dest <= slots; ++dest) {
          if (dest == begin) continue;
          const std::size_t distance = dest > begin ? dest - begin : begin - dest;
          if (distance > options.max_shift_distance) continue;
          auto candidate = shifted(hyp, begin, len, dest);
          const std::size_t cost = edit_distance(candidate, reference);
          if (cost < best_cost) {
            best_cost = cost;
            best = std::move(candidate);
          }
        }
      }
    }
    if (best.empty()) break;
    hyp = std::move(best);
    current = best_cost;
    ++shifts;
  }
  const auto hyp_chars = joined_characters(hyp);
  const auto ref_chars = joined_characters(reference);
  const double edits = static_cast<double>(shifts + edit_distance(hyp_chars, ref_chars));
  return edits / static_cast<double>(hyp_chars.size());
}

MetricScore character_score(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs,
                            const EvalOptions& options, const CharacterOptions& character_options) {
  const auto corpus = prepare(hypotheses, refs, options);
  double total = 0.0;
  for (std::size_t i = 0; i < corpus.hyps.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ref : corpus.refs[i]) {
      best = std::min(best, character_sentence(corpus.hyps[i], ref, character_options));
    }
    total += best;
  }
  MetricScore score;
  score.name = "CharacTER";
  score.direction = Direction::LowerBetter;
  score.reference_count = refs.reference_count();
  score.value = total / static_cast<double>(corpus.hyps.size());
  return score;
}

HleporParts hlepor_sentence(const Tokens& hypothesis, const Tokens& reference,
                            const HleporParams& params) {
  HleporParts parts;
  const std::size_t c = hypothesis.size();
  const std::size_t r = reference.size();
  if (c == 0 || r == 0) {
    parts.score = (c == r) ? 1.0 : 0.0;
    return parts;
  }
  const double cd = static_cast<double>(c);
  const double rd = static_cast<double>(r);
  if (c < r) {
    parts.length_penalty = std::exp(1.0 - rd / cd);
  } else if (c > r) {
    parts.length_penalty = std::exp(1.0 - cd / rd);
  } else {
    parts.length_penalty = 1.0;
  }

  // Nearest-match alignment: unique matches align directly; several
  // candidates are ranked by surrounding-context agreement, then by relative
  // position distance, then by reference order.
  std::vector<bool> used(r, false);
  std::size_t aligned = 0;
  double position_sum = 0.0;
  const auto relative_gap = [&](std::size_t i, std::size_t j) {
    return std::abs(static_cast<double>(i + 1) / cd - static_cast<double>(j + 1) / rd);
  };
  for (std::size_t i = 0; i < c; ++i) {
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < r; ++j) {
      if (!used[j] && reference[j] == hypothesis[i]) candidates.push_back(j);
    }
    if (candidates.empty()) continue;
    std::size_t best = candidates.front();
    if (candidates.size() > 1) {
      int best_context = -1;
      for (const std::size_t j : candidates) {
        int context = 0;
        for (int k = 1; k <= params.context; ++k) {
          const auto ku = static_cast<std::size_t>(k);
          if (i >= ku && j >= ku && hypothesis[i - ku] == reference[j - ku]) ++context;
          if (i + ku < c && j + ku < r && hypothesis[i + ku] == reference[j + ku]) ++context;
        }
        if (context > best_context ||
            (context == best_context && relative_gap(i, j) < relative_gap(i, best))) {
          best_context = context;
          best = j;
        }
      }
    }
    used[best] = true;
    ++aligned;
    position_sum += relative_gap(i, best);
  }
  parts.npd = position_sum / cd;
  parts.position_penalty = std::exp(-parts.npd);
  parts.precision = static_cast<double>(aligned) / cd;
  parts.recall = static_cast<double>(aligned) / rd;
  if (aligned == 0) {
    parts.fmeasure = 0.0;
    parts.score = 0.0;
    return parts;
  }
  parts.fmeasure =
      (params.alpha + params.beta) / (params.alpha / parts.recall + params.beta / parts.precision);
  const double weights = params.weight_length + params.weight_position + params.weight_fmeasure;
  parts.score = weights / (params.weight_length / parts.length_penalty +
                           params.weight_position / parts.position_penalty +
                           params.weight_fmeasure / parts.fmeasure);
  return parts;
}

MetricScore hlepor(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs,
                   const HleporParams& params, const EvalOptions& options) {
  const auto corpus = prepare(hypotheses, refs, options);
  double total = 0.0;
  for (std::size_t i = 0; i < corpus.hyps.size(); ++i) {
    double best = 0.0;
    for (const auto& ref : corpus.refs[i]) {
      best = std::max(best, hlepor_sentence(corpus.hyps[i], ref, params).score);
    }
    total += best;
  }
  MetricScore score;
  score.name = "hLEPOR";
  score.reference_count = refs.reference_count();
  score.value = total / static_cast<double>(corpus.hyps.size());
  score.details["alpha"] = params.alpha;
  score.details["beta"] = params.beta;
  score.details["weight_length"] = params.weight_length;
  score.details["weight_position"] = params.weight_position;
  score.details["weight_fmeasure"] = params.weight_fmeasure;
  return score;
}

}  // namespace radnmt
