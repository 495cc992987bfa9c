#include "radnmt/decode.hpp"

#include <algorithm>
#include <future>
#include <limits>

#include "radnmt/error.hpp"

namespace radnmt {

namespace {

template <class Real>
struct LiveHypothesis {
  std::vector<int> tokens;
  double log_prob = 0.0;
  Vector<Real> state;
  int last = kBosId;
};

struct Candidate {
  std::size_t parent;
  int token;
  double score;
};

template <class Real>
SourceContext<Real> source_context(const ModelParams<Real>& model, const EncodedSource& source) {
  if (source.empty()) throw InputError("cannot decode an empty source sentence");
  return prepare_source(model, compose_source(model.setting, source, model.source),
                        std::vector<std::uint8_t>(source.size(), 1));
}

}  // namespace

int default_max_len(std::size_t source_length) {
  return static_cast<int>(std::min<std::size_t>(2 * source_length + 5, 100));
}

template <class Real>
Hypothesis beam_search(const ModelParams<Real>& model, const EncodedSource& source, int width,
                       int max_len, const BeamObserver& observer) {
  if (width < 1) throw InputError("beam width must be at least 1");
  if (max_len < 1) throw InputError("max_len must be at least 1");
  const auto src = source_context(model, source);

  std::vector<LiveHypothesis<Real>> live(1);
  live[0].state = src.initial_state;
  std::vector<Hypothesis> finished;
  std::vector<Candidate> candidates;

  for (int step = 0; step < max_len && !live.empty(); ++step) {
    candidates.clear();
    std::vector<Vector<Real>> next_states;
    next_states.reserve(live.size());
    for (std::size_t h = 0; h < live.size(); ++h) {
      auto dist = next_token_distribution(model, src, live[h].state, live[h].last);
      for (Eigen::Index v = 0; v < dist.log_probs.size(); ++v) {
        candidates.push_back({h, static_cast<int>(v),
                              live[h].log_prob + static_cast<double>(dist.log_probs(v))});
      }
      next_states.push_back(std::move(dist.state));
    }
    const std::size_t keep =
        std::min(candidates.size(), static_cast<std::size_t>(width) - finished.size());
    const auto better = [](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.parent != b.parent) return a.parent < b.parent;
      return a.token < b.token;
    };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), better);
    if (observer) {
      std::vector<double> kept;
      for (std::size_t i = 0; i < keep; ++i) kept.push_back(candidates[i].score);
      double best_discarded = -std::numeric_limits<double>::infinity();
      for (std::size_t i = keep; i < candidates.size(); ++i) {
        best_discarded = std::max(best_discarded, candidates[i].score);
      }
      observer(step, kept, best_discarded);
    }
    std::vector<LiveHypothesis<Real>> next;
    for (std::size_t i = 0; i < keep; ++i) {
      const auto& c = candidates[i];
      auto tokens = live[c.parent].tokens;
      tokens.push_back(c.token);
      if (c.token == kEosId) {
        finished.push_back({std::move(tokens), c.score, true});
      } else {
        next.push_back({std::move(tokens), c.score, next_states[c.parent], c.token});
      }
    }
    live = std::move(next);
    if (finished.size() >= static_cast<std::size_t>(width)) break;
  }

  // Live and finished hypotheses compete on normalized score.
  std::vector<Hypothesis> pool = finished;
  for (auto& h : live) pool.push_back({std::move(h.tokens), h.log_prob, false});
  // Stable selection keeps the earliest of equally scored hypotheses.
  const Hypothesis* best = &pool.front();
  for (const auto& h : pool) {
    if (h.normalized_score() > best->normalized_score()) best = &h;
  }
  return *best;
}

template <class Real>
Hypothesis greedy_decode(const ModelParams<Real>& model, const EncodedSource& source, int max_len) {
  if (max_len < 1) throw InputError("max_len must be at least 1");
  const auto src = source_context(model, source);
  Hypothesis out;
  Vector<Real> state = src.initial_state;
  int last = kBosId;
  for (int step = 0; step < max_len; ++step) {
    auto dist = next_token_distribution(model, src, state, last);
    Eigen::Index best = 0;
    for (Eigen::Index v = 1; v < dist.log_probs.size(); ++v) {
      if (dist.log_probs(v) > dist.log_probs(best)) best = v;
    }
    out.log_prob += static_cast<double>(dist.log_probs(best));
    last = static_cast<int>(best);
    out.tokens.push_back(last);
    if (last == kEosId) {
      out.finished = true;
      break;
    }
    state = std::move(dist.state);
  }
  return out;
}

std::vector<Tokens> translate_sentences(const Translator& translator,
                                        const std::vector<Tokens>& sources,
                                        const TranslateOptions& options) {
  const auto translate_one = [&](const Tokens& words) -> Tokens {
    if (words.empty()) return {};
    const auto encoded = encode_source(words, translator.vocab, translator.table);
    const int max_len = options.max_len > 0 ? options.max_len : default_max_len(words.size());
    const auto hyp = options.beam_width == 1
                         ? greedy_decode(translator.model, encoded, max_len)
                         : beam_search(translator.model, encoded, options.beam_width, max_len);
    return ids_to_tokens(translator.vocab.target, hyp.tokens);
  };

  std::vector<Tokens> out(sources.size());
  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1 || sources.size() < 2) {
    for (std::size_t i = 0; i < sources.size(); ++i) out[i] = translate_one(sources[i]);
    return out;
  }
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < sources.size(); i += threads) out[i] = translate_one(sources[i]);
    }));
  }
  for (auto& f : workers) f.get();
  return out;
}

void translate_stream(const Translator& translator, std::istream& in, std::ostream& out,
                      const TranslateOptions& options) {
  write_tokenized(out, translate_sentences(translator, read_tokenized(in, "source"), options));
  if (!out) throw IoError("failed writing translations");
}

template Hypothesis beam_search(const ModelParams<float>&, const EncodedSource&, int, int,
                                const BeamObserver&);
template Hypothesis beam_search(const ModelParams<double>&, const EncodedSource&, int, int,
                                const BeamObserver&);
template Hypothesis greedy_decode(const ModelParams<float>&, const EncodedSource&, int);
template Hypothesis greedy_decode(const ModelParams<double>&, const EncodedSource&, int);

}  // namespace radnmt
