#pragma once

// Straight-line forward pass written with plain loops over std::vector, used
// as an independent oracle for the Eigen implementation. Reads parameters
// element by element; shares no code with src/model.cpp.

#include <cmath>
#include <vector>

#include "radnmt/model.hpp"

namespace radnmt::testing {

using Vec = std::vector<double>;

inline Vec mat_vec(const Matrix<double>& m, const Vec& x) {
  Vec out(static_cast<std::size_t>(m.rows()), 0.0);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) acc += m(i, j) * x[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

inline Vec to_vec(const Vector<double>& v) { return Vec(v.data(), v.data() + v.size()); }

inline Vec row_of(const Matrix<double>& m, int row) {
  Vec out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(j)] = m(row, j);
  return out;
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline Vec ref_gru(const GruParams<double>& p, const Vec& x, const Vec& h) {
  const auto ax_r = mat_vec(p.W_r, x), ah_r = mat_vec(p.U_r, h);
  const auto ax_u = mat_vec(p.W_u, x), ah_u = mat_vec(p.U_u, h);
  const std::size_t n = h.size();
  Vec r(n), u(n), rh(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = logistic(ax_r[i] + ah_r[i] + p.b_r(static_cast<Eigen::Index>(i)));
    u[i] = logistic(ax_u[i] + ah_u[i] + p.b_u(static_cast<Eigen::Index>(i)));
    rh[i] = r[i] * h[i];
  }
  const auto ax_h = mat_vec(p.W_h, x), ah_h = mat_vec(p.U_h, rh);
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cand = std::tanh(ax_h[i] + ah_h[i] + p.b_h(static_cast<Eigen::Index>(i)));
    out[i] = (1.0 - u[i]) * h[i] + u[i] * cand;
  }
  return out;
}

inline Vec ref_compose(const ModelParams<double>& p, const EncodedToken& tok) {
  Vec out;
  const int d = p.dims.embedding;
  if (uses_word(p.setting)) {
    for (int k = 0; k < d; ++k) out.push_back(p.source.word(tok.word, k));
  }
  if (uses_char(p.setting)) {
    for (int k = 0; k < d; ++k) {
      double acc = 0.0;
      for (int id : tok.characters) acc += p.source.character(id, k);
      out.push_back(acc);
    }
  }
  if (uses_radical(p.setting)) {
    for (int k = 0; k < d; ++k) {
      double acc = 0.0;
      for (int id : tok.radicals) acc += p.source.radical(id, k);
      out.push_back(acc);
    }
  }
  return out;
}

// Annotations for an unpadded sentence: one [forward; backward] row per word.
inline std::vector<Vec> ref_encode(const ModelParams<double>& p, const std::vector<Vec>& inputs) {
  const std::size_t n = inputs.size();
  const std::size_t hidden = static_cast<std::size_t>(p.dims.hidden);
  std::vector<Vec> fwd(n), bwd(n);
  Vec h(hidden, 0.0);
  for (std::size_t j = 0; j < n; ++j) fwd[j] = h = ref_gru(p.encoder_forward, inputs[j], h);
  h.assign(hidden, 0.0);
  for (std::size_t j = n; j-- > 0;) bwd[j] = h = ref_gru(p.encoder_backward, inputs[j], h);
  std::vector<Vec> ann(n);
  for (std::size_t j = 0; j < n; ++j) {
    ann[j] = fwd[j];
    ann[j].insert(ann[j].end(), bwd[j].begin(), bwd[j].end());
  }
  return ann;
}

inline Vec ref_initial_state(const ModelParams<double>& p, const std::vector<Vec>& ann) {
  Vec mean(ann[0].size(), 0.0);
  for (const auto& a : ann) {
    for (std::size_t k = 0; k < a.size(); ++k) mean[k] += a[k] / static_cast<double>(ann.size());
  }
  auto pre = mat_vec(p.init_weight, mean);
  for (std::size_t i = 0; i < pre.size(); ++i) {
    pre[i] = std::tanh(pre[i] + p.init_bias(static_cast<Eigen::Index>(i)));
  }
  return pre;
}

struct RefAttention {
  Vec s_tilde;
  Vec alpha;
  Vec context;
};

inline RefAttention ref_attend(const ModelParams<double>& p, const Vec& s_prev, const Vec& y_emb,
                               const std::vector<Vec>& ann) {
  RefAttention out;
  out.s_tilde = ref_gru(p.decoder_pre, y_emb, s_prev);
  const auto q = mat_vec(p.att_state, out.s_tilde);
  Vec e(ann.size());
  for (std::size_t j = 0; j < ann.size(); ++j) {
    const auto k = mat_vec(p.att_annotation, ann[j]);
    double acc = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      acc += p.att_score(ii) * std::tanh(q[i] + k[i] + p.att_bias(ii));
    }
    e[j] = acc;
  }
  double z = 0.0;
  for (double v : e) z += std::exp(v);
  out.alpha.resize(e.size());
  for (std::size_t j = 0; j < e.size(); ++j) out.alpha[j] = std::exp(e[j]) / z;
  out.context.assign(ann[0].size(), 0.0);
  for (std::size_t j = 0; j < ann.size(); ++j) {
    for (std::size_t k = 0; k < ann[j].size(); ++k) out.context[k] += out.alpha[j] * ann[j][k];
  }
  return out;
}

struct RefStep {
  Vec state;
  Vec logits;
};

inline RefStep ref_decode_step(const ModelParams<double>& p, const Vec& s_tilde, const Vec& c,
                               const Vec& y_emb) {
  RefStep out;
  out.state = ref_gru(p.decoder_post, c, s_tilde);
  const auto a = mat_vec(p.readout_state, out.state);
  const auto b = mat_vec(p.readout_prev, y_emb);
  const auto cc = mat_vec(p.readout_context, c);
  Vec o(a.size());
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = std::tanh(a[i] + b[i] + cc[i] + p.readout_bias(static_cast<Eigen::Index>(i)));
  }
  out.logits = mat_vec(p.output_weight, o);
  for (std::size_t i = 0; i < out.logits.size(); ++i) {
    out.logits[i] += p.output_bias(static_cast<Eigen::Index>(i));
  }
  return out;
}

// Summed NLL of `target` (ending with EOS) given an unpadded source.
inline double ref_sentence_nll(const ModelParams<double>& p, const EncodedSource& source,
                               const std::vector<int>& target) {
  std::vector<Vec> inputs;
  for (const auto& tok : source) inputs.push_back(ref_compose(p, tok));
  const auto ann = ref_encode(p, inputs);
  Vec s = ref_initial_state(p, ann);
  int prev = kBosId;
  double nll = 0.0;
  for (int y : target) {
    const Vec y_emb = row_of(p.target_embedding, prev);
    const auto att = ref_attend(p, s, y_emb, ann);
    const auto step = ref_decode_step(p, att.s_tilde, att.context, y_emb);
    double mx = step.logits[0];
    for (double v : step.logits) mx = std::max(mx, v);
    double z = 0.0;
    for (double v : step.logits) z += std::exp(v - mx);
    nll -= step.logits[static_cast<std::size_t>(y)] - mx - std::log(z);
    s = step.state;
    prev = y;
  }
  return nll;
}

}  // namespace radnmt::testing
