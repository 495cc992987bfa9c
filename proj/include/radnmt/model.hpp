#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "radnmt/composition.hpp"
#include "radnmt/corpus.hpp"
#include "radnmt/tensor.hpp"

namespace radnmt {

struct ModelDims {
  int embedding = 620;  // d: width of every source part and the target embedding
  int hidden = 1000;    // H
  int word_vocab = 0;
  int char_vocab = 0;
  int radical_vocab = 0;
  int target_vocab = 0;

  bool operator==(const ModelDims&) const = default;
};

/// Gated recurrent unit:
///   r  = sigmoid(W_r x + U_r h + b_r)
///   u  = sigmoid(W_u x + U_u h + b_u)
///   h~ = tanh(W_h x + U_h (r * h) + b_h)
///   h' = (1 - u) * h + u * h~
template <class Real>
struct GruParams {
  Matrix<Real> W_r, W_u, W_h;  // hidden x input
  Matrix<Real> U_r, U_u, U_h;  // hidden x hidden
  Vector<Real> b_r, b_u, b_h;

  GruParams() = default;
  GruParams(int input, int hidden);

  template <class F>
  void for_each(const std::string& prefix, F&& f) {
    f(prefix + ".W_r", W_r);
    f(prefix + ".W_u", W_u);
    f(prefix + ".W_h", W_h);
    f(prefix + ".U_r", U_r);
    f(prefix + ".U_u", U_u);
    f(prefix + ".U_h", U_h);
    f(prefix + ".b_r", b_r);
    f(prefix + ".b_u", b_u);
    f(prefix + ".b_h", b_h);
  }
};

/// Flat view of one named tensor.
template <class Real>
struct TensorView {
  std::string name;
  Real* data = nullptr;
  Eigen::Index size = 0;
  std::vector<Eigen::Index> shape;  // rank 1 for vectors, 2 for matrices
};

/// Every trainable tensor of the attention encoder-decoder.
///
/// The readout layer and the attention alignment space have widths d and H
/// respectively. The same type doubles as a gradient container.
template <class Real>
struct ModelParams {
  CompositionSetting setting = CompositionSetting::WCR;
  ModelDims dims;

  EmbeddingTables<Real> source;
  Matrix<Real> target_embedding;  // target_vocab x d

  GruParams<Real> encoder_forward;   // input_dim -> H
  GruParams<Real> encoder_backward;  // input_dim -> H

  Matrix<Real> init_weight;  // H x 2H, s_0 = tanh(init_weight * mean(h) + init_bias)
  Vector<Real> init_bias;

  GruParams<Real> decoder_pre;  // (s_{t-1}, y_{t-1}) -> s~_{t-1}; input d

  Matrix<Real> att_state;       // H x H, applied to s~
  Matrix<Real> att_annotation;  // H x 2H, applied to h_j
  Vector<Real> att_bias;        // H
  Vector<Real> att_score;       // v_a, H

  GruParams<Real> decoder_post;  // (s~_{t-1}, c_t) -> s_t; input 2H

  Matrix<Real> readout_state;    // d x H
  Matrix<Real> readout_prev;     // d x d
  Matrix<Real> readout_context;  // d x 2H
  Vector<Real> readout_bias;     // d

  Matrix<Real> output_weight;  // target_vocab x d
  Vector<Real> output_bias;    // target_vocab

  /// Zero-filled tensors of the right shapes.
  static ModelParams zeros(CompositionSetting setting, const ModelDims& dims);
  ModelParams zeros_like() const { return zeros(setting, dims); }

  int input_width() const { return input_dim(setting, dims.embedding); }

  template <class F>
  void for_each(F&& f) {
    f(std::string("source.word"), source.word);
    f(std::string("source.character"), source.character);
    f(std::string("source.radical"), source.radical);
    f(std::string("target.embedding"), target_embedding);
    encoder_forward.for_each("encoder.forward", f);
    encoder_backward.for_each("encoder.backward", f);
    f(std::string("init.weight"), init_weight);
    f(std::string("init.bias"), init_bias);
    decoder_pre.for_each("decoder.pre", f);
    f(std::string("attention.state"), att_state);
    f(std::string("attention.annotation"), att_annotation);
    f(std::string("attention.bias"), att_bias);
    f(std::string("attention.score"), att_score);
    decoder_post.for_each("decoder.post", f);
    f(std::string("readout.state"), readout_state);
    f(std::string("readout.prev"), readout_prev);
    f(std::string("readout.context"), readout_context);
    f(std::string("readout.bias"), readout_bias);
    f(std::string("output.weight"), output_weight);
    f(std::string("output.bias"), output_bias);
  }

  std::vector<TensorView<Real>> tensors();
  std::vector<TensorView<const Real>> tensors() const;

  void set_zero();
  bool all_finite() const;
};

template <class To, class From>
ModelParams<To> cast_params(const ModelParams<From>& from);

struct InitOptions {
  double uniform_scale = 0.08;
  bool orthogonal_recurrent = true;
};

/// Recurrent (U) matrices orthogonal, all other matrices uniform in
/// [-scale, scale], biases zero.
template <class Real>
ModelParams<Real> init_model(CompositionSetting setting, const ModelDims& dims,
                             std::uint64_t seed, const InitOptions& options = {});

// ---------------------------------------------------------------------------
// Forward pieces.

template <class Real>
Vector<Real> gru_step(const GruParams<Real>& p, const Vector<Real>& x, const Vector<Real>& h);

/// Bidirectional encoder over one sentence. `inputs` holds one composed row
/// per position; masked positions carry the previous state through and get a
/// zero annotation. Returns T x 2H annotations [forward; backward].
template <class Real>
Matrix<Real> encode(const ModelParams<Real>& params, const Matrix<Real>& inputs,
                    const std::vector<std::uint8_t>& mask);

/// Source-side quantities reused at every decoder step.
template <class Real>
struct SourceContext {
  Matrix<Real> annotations;  // T x 2H
  Matrix<Real> projected;    // T x H, annotations * att_annotation^T
  std::vector<std::uint8_t> mask;
  Vector<Real> initial_state;
};

template <class Real>
SourceContext<Real> prepare_source(const ModelParams<Real>& params, const Matrix<Real>& inputs,
                                   const std::vector<std::uint8_t>& mask);

template <class Real>
struct AttentionResult {
  Vector<Real> context;  // c_t, 2H
  Vector<Real> weights;  // alpha_t, T; zero on masked positions
  Vector<Real> s_tilde;  // H
};

/// s~ = GRU_pre(s_prev, y_prev), e_j = v^T tanh(A s~ + B h_j + b), alpha =
/// masked softmax(e), c = sum_j alpha_j h_j. Throws InputError if every
/// position is masked.
template <class Real>
AttentionResult<Real> attend(const ModelParams<Real>& params, const Vector<Real>& s_prev,
                             const Vector<Real>& y_prev_embedding, const SourceContext<Real>& src);

template <class Real>
struct StepResult {
  Vector<Real> state;   // s_t
  Vector<Real> logits;  // target vocabulary
};

/// s_t = GRU_post(s~, c_t); logits = W_o tanh(U s_t + V y_prev + C c_t + b) + b_o.
template <class Real>
StepResult<Real> decode_step(const ModelParams<Real>& params, const Vector<Real>& s_tilde,
                             const Vector<Real>& context, const Vector<Real>& y_prev_embedding);

template <class Real>
Vector<Real> log_softmax(const Vector<Real>& logits);

/// One inference step from state s_prev after emitting y_prev: returns the
/// new state and log-probabilities over the target vocabulary.
template <class Real>
struct InferenceStep {
  Vector<Real> state;
  Vector<Real> log_probs;
  Vector<Real> attention;
};

template <class Real>
InferenceStep<Real> next_token_distribution(const ModelParams<Real>& params,
                                            const SourceContext<Real>& src,
                                            const Vector<Real>& s_prev, int y_prev);

/// Teacher-forced log p(target | source), accumulated in double in token
/// order. `target` normally ends with EOS.
template <class Real>
double sequence_log_prob(const ModelParams<Real>& params, const EncodedSource& source,
                       const std::vector<int>& target);

// ---------------------------------------------------------------------------
// Training.

struct DropoutConfig {
  double rate = 0.0;       // applied to the readout output only
  std::mt19937_64* rng = nullptr;  // required when rate > 0
};

struct LossResult {
  double mean_loss = 0.0;  // mean NLL per target token
  std::size_t tokens = 0;
  std::vector<double> sentence_loss;  // summed NLL per sentence
};

/// Teacher-forced mean negative log-likelihood of a batch.
template <class Real>
LossResult batch_loss(const ModelParams<Real>& params, const EncodedBatch& batch,
                      const DropoutConfig& dropout = {});

/// Loss plus exact gradients of the mean loss, written into `grads` (which is
/// reset first). Dropout masks are drawn in the same order as batch_loss.
template <class Real>
LossResult batch_gradients(const ModelParams<Real>& params, const EncodedBatch& batch,
                           ModelParams<Real>& grads, const DropoutConfig& dropout = {});

}  // namespace radnmt
