#pragma once

#include <map>
#include <string>
#include <vector>

#include "radnmt/corpus.hpp"

namespace radnmt {

/// Per hypothesis line, the 1..N reference token sequences.
struct ReferenceSet {
  std::vector<std::vector<Tokens>> lines;

  /// Transposes N line-aligned reference corpora. Throws InputError if their
  /// line counts differ.
  static ReferenceSet from_corpora(const std::vector<std::vector<Tokens>>& corpora);
  /// Only the k-th reference of every line.
  ReferenceSet single(std::size_t k) const;
  /// Minimum number of references available on any line.
  std::size_t reference_count() const;
  std::size_t size() const { return lines.size(); }
};

enum class Direction { HigherBetter, LowerBetter };

struct MetricScore {
  std::string name;
  double value = 0.0;
  /// Cumulative scores per n-gram order (BLEU-1..4, NIST-1..5); empty for
  /// sentence-averaged metrics.
  std::vector<double> breakdown;
  std::size_t reference_count = 0;
  Direction direction = Direction::HigherBetter;
  /// Auxiliary quantities (precisions, brevity penalty, lengths, ...).
  std::map<std::string, double> details;
};

struct EvalOptions {
  bool case_insensitive = false;
};

/// Corpus BLEU with clipped n-gram precisions, no smoothing, and brevity
/// penalty against the closest reference length (shorter wins ties).
/// breakdown[k-1] is cumulative BLEU-k; value is BLEU-max_n.
MetricScore bleu(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs, int max_n = 4,
                 const EvalOptions& options = {});

/// NIST information-weighted n-gram score. Information weights come from
/// n-gram counts pooled over every reference sentence; matches are clipped by
/// the per-line maximum reference count; the brevity factor uses the average
/// reference length and equals 0.5 at a length ratio of 2/3.
MetricScore nist(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs, int max_n = 5,
                 const EvalOptions& options = {});

struct CharacterOptions {
  std::size_t max_shift_distance = 50;
  std::size_t max_shift_phrase = 10;
};

/// CharacTER: greedy word-level shifts (each strictly lowering the word edit
/// distance, cost 1 per shift) followed by character-level edit distance
/// against the reference, divided by the hypothesis character count (words
/// joined by single spaces). Per line the best reference is used; the corpus
/// value is the mean over lines. An empty hypothesis scores 1 against a
/// non-empty reference. Lower is better and values may exceed 1.
MetricScore character_score(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs,
                            const EvalOptions& options = {},
                            const CharacterOptions& character_options = {});

/// Sentence-level CharacTER against one reference.
double character_sentence(const Tokens& hypothesis, const Tokens& reference,
                          const CharacterOptions& options = {});

struct HleporParams {
  double alpha = 9.0;  // recall weight
  double beta = 1.0;   // precision weight
  int context = 2;     // n-gram window used to disambiguate alignments
  double weight_length = 2.0;
  double weight_position = 1.0;
  double weight_fmeasure = 3.0;

  bool operator==(const HleporParams&) const = default;
};

struct HleporParts {
  double length_penalty = 0.0;
  double position_penalty = 0.0;  // exp(-NPD)
  double npd = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fmeasure = 0.0;  // weighted harmonic mean of precision and recall
  double score = 0.0;
};

/// Sentence-level hLEPOR against one reference.
HleporParts hlepor_sentence(const Tokens& hypothesis, const Tokens& reference,
                            const HleporParams& params = {});

/// Mean of sentence hLEPOR; with several references the best one per line is
/// used. Use per_reference_average for the reference-averaging protocol.
MetricScore hlepor(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs,
                   const HleporParams& params = {}, const EvalOptions& options = {});

/// Scores against each reference separately and averages the results.
template <class Metric>
MetricScore per_reference_average(const std::vector<Tokens>& hypotheses, const ReferenceSet& refs,
                                  Metric&& metric) {
  const std::size_t n = refs.reference_count();
  MetricScore out;
  for (std::size_t k = 0; k < n; ++k) {
    MetricScore part = metric(hypotheses, refs.single(k));
    if (k == 0) {
      out = part;
      out.value = 0.0;
      out.details.clear();
    }
    out.value += part.value / static_cast<double>(n);
    out.details["ref" + std::to_string(k + 1)] = part.value;
  }
  out.reference_count = n;
  return out;
}

/// Levenshtein distance over arbitrary token sequences.
std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace radnmt
