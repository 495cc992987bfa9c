#pragma once

#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "radnmt/corpus.hpp"
#include "radnmt/decomposition.hpp"
#include "radnmt/model.hpp"

namespace radnmt {

/// Decoded target sequence. `tokens` ends with EOS when `finished`.
struct Hypothesis {
  std::vector<int> tokens;
  double log_prob = 0.0;
  bool finished = false;

  /// Total log-probability divided by the number of emitted tokens.
  double normalized_score() const {
    return tokens.empty() ? log_prob : log_prob / static_cast<double>(tokens.size());
  }
};

/// 2 * source_length + 5, capped at 100.
int default_max_len(std::size_t source_length);

/// Called once per expansion step with the scores of the retained candidates
/// and the best score among the discarded ones (-inf if none were dropped).
using BeamObserver =
    std::function<void(int step, std::span<const double> kept, double best_discarded)>;

/// Beam search over accumulated log-probability. Each step expands every live
/// hypothesis over the whole target vocabulary and keeps the best
/// (width - finished) candidates; candidates ending in EOS move to the finished
/// pool. Stops once `width` hypotheses have finished or after `max_len` steps.
/// Returns the best hypothesis by length-normalized score among finished and
/// still-live ones; earlier finished entries win ties. Ties during expansion are broken by parent order
/// then token id. Throws InputError on an empty source or width < 1.
template <class Real>
Hypothesis beam_search(const ModelParams<Real>& model, const EncodedSource& source, int width,
                       int max_len, const BeamObserver& observer = {});

/// Argmax decoding (lowest id on ties), stopping at EOS or max_len.
template <class Real>
Hypothesis greedy_decode(const ModelParams<Real>& model, const EncodedSource& source, int max_len);

/// A trained model together with what is needed to map text in and out.
struct Translator {
  const ModelParams<float>& model;
  const GranularVocabulary& vocab;
  const DecompositionTable& table;
};

struct TranslateOptions {
  int beam_width = 10;
  int max_len = 0;  // 0 selects default_max_len per sentence
  unsigned threads = 1;
};

/// Translates tokenized sentences. Empty input sentences give empty output;
/// BOS/EOS are stripped and UNK is kept as its surface form.
std::vector<Tokens> translate_sentences(const Translator& translator,
                                        const std::vector<Tokens>& sources,
                                        const TranslateOptions& options);

/// Line-by-line translation of a tokenized stream.
void translate_stream(const Translator& translator, std::istream& in, std::ostream& out,
                      const TranslateOptions& options);

extern template Hypothesis beam_search(const ModelParams<float>&, const EncodedSource&, int, int,
                                       const BeamObserver&);
extern template Hypothesis beam_search(const ModelParams<double>&, const EncodedSource&, int, int,
                                       const BeamObserver&);
extern template Hypothesis greedy_decode(const ModelParams<float>&, const EncodedSource&, int);
extern template Hypothesis greedy_decode(const ModelParams<double>&, const EncodedSource&, int);

}  // namespace radnmt
