#include "radnmt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radnmt/error.hpp"

namespace radnmt {

namespace {

template <class Real>
Vector<Real> sigmoid(const Vector<Real>& z) {
  return (Real(1) / (Real(1) + (-z.array()).exp())).matrix();
}

template <class Real>
struct GruCache {
  Vector<Real> x, h, r, u, cand, rh;
};

template <class Real>
Vector<Real> gru_forward(const GruParams<Real>& p, const Eigen::Ref<const Vector<Real>>& x,
                         const Eigen::Ref<const Vector<Real>>& h, GruCache<Real>* cache) {
  Vector<Real> r = sigmoid<Real>(p.W_r * x + p.U_r * h + p.b_r);
  Vector<Real> u = sigmoid<Real>(p.W_u * x + p.U_u * h + p.b_u);
  Vector<Real> rh = r.cwiseProduct(h);
  Vector<Real> cand = (p.W_h * x + p.U_h * rh + p.b_h).array().tanh().matrix();
  Vector<Real> out = (Real(1) - u.array()).matrix().cwiseProduct(h) + u.cwiseProduct(cand);
  if (cache) {
    cache->x = x;
    cache->h = h;
    cache->r = std::move(r);
    cache->u = std::move(u);
    cache->cand = std::move(cand);
    cache->rh = std::move(rh);
  }
  return out;
}

// Accumulates parameter gradients into g; returns input and previous-state
// gradients through dx and dh (overwritten).
template <class Real>
void gru_backward(const GruParams<Real>& p, const GruCache<Real>& c, const Vector<Real>& dout,
                  GruParams<Real>& g, Vector<Real>& dx, Vector<Real>& dh) {
  const Vector<Real> dcand = dout.cwiseProduct(c.u);
  const Vector<Real> du = dout.cwiseProduct(c.cand - c.h);
  dh = dout.cwiseProduct((Real(1) - c.u.array()).matrix());

  const Vector<Real> da = dcand.cwiseProduct((Real(1) - c.cand.array().square()).matrix());
  g.W_h.noalias() += da * c.x.transpose();
  g.U_h.noalias() += da * c.rh.transpose();
  g.b_h += da;
  dx.noalias() = p.W_h.transpose() * da;
  const Vector<Real> drh = p.U_h.transpose() * da;
  dh += drh.cwiseProduct(c.r);
  const Vector<Real> dr = drh.cwiseProduct(c.h);

  const Vector<Real> dzr = dr.cwiseProduct(c.r.cwiseProduct((Real(1) - c.r.array()).matrix()));
  g.W_r.noalias() += dzr * c.x.transpose();
  g.U_r.noalias() += dzr * c.h.transpose();
  g.b_r += dzr;
  dx.noalias() += p.W_r.transpose() * dzr;
  dh.noalias() += p.U_r.transpose() * dzr;

  const Vector<Real> dzu = du.cwiseProduct(c.u.cwiseProduct((Real(1) - c.u.array()).matrix()));
  g.W_u.noalias() += dzu * c.x.transpose();
  g.U_u.noalias() += dzu * c.h.transpose();
  g.b_u += dzu;
  dx.noalias() += p.W_u.transpose() * dzu;
  dh.noalias() += p.U_u.transpose() * dzu;
}

template <class Real>
struct EncoderCache {
  std::vector<GruCache<Real>> forward;
  std::vector<GruCache<Real>> backward;
};

template <class Real>
Matrix<Real> encode_impl(const ModelParams<Real>& params, const Matrix<Real>& inputs,
                         const std::vector<std::uint8_t>& mask, EncoderCache<Real>* cache) {
  if (inputs.cols() != params.input_width()) {
    throw ShapeError("composed input width " + std::to_string(inputs.cols()) +
                     " does not match model input width " +
                     std::to_string(params.input_width()));
  }
  if (static_cast<std::size_t>(inputs.rows()) != mask.size()) {
    throw ShapeError("mask length does not match the number of input rows");
  }
  const Eigen::Index steps = inputs.rows();
  const int hidden = params.dims.hidden;
  Matrix<Real> annotations = Matrix<Real>::Zero(steps, 2 * hidden);
  if (cache) {
    cache->forward.assign(static_cast<std::size_t>(steps), {});
    cache->backward.assign(static_cast<std::size_t>(steps), {});
  }
  Vector<Real> h = Vector<Real>::Zero(hidden);
  for (Eigen::Index j = 0; j < steps; ++j) {
    if (!mask[static_cast<std::size_t>(j)]) continue;
    h = gru_forward<Real>(params.encoder_forward, inputs.row(j).transpose(), h,
                          cache ? &cache->forward[static_cast<std::size_t>(j)] : nullptr);
    annotations.row(j).head(hidden) = h.transpose();
  }
  h.setZero();
  for (Eigen::Index j = steps - 1; j >= 0; --j) {
    if (!mask[static_cast<std::size_t>(j)]) continue;
    h = gru_forward<Real>(params.encoder_backward, inputs.row(j).transpose(), h,
                          cache ? &cache->backward[static_cast<std::size_t>(j)] : nullptr);
    annotations.row(j).tail(hidden) = h.transpose();
  }
  return annotations;
}

template <class Real>
std::size_t valid_count(const std::vector<std::uint8_t>& mask) {
  std::size_t n = 0;
  for (const auto m : mask) n += m ? 1 : 0;
  return n;
}

template <class Real>
Vector<Real> mean_annotation(const Matrix<Real>& annotations, const std::vector<std::uint8_t>& mask) {
  Vector<Real> mean = Vector<Real>::Zero(annotations.cols());
  const std::size_t n = valid_count<Real>(mask);
  if (n == 0) throw InputError("source sentence has no unmasked positions");
  for (Eigen::Index j = 0; j < annotations.rows(); ++j) {
    if (mask[static_cast<std::size_t>(j)]) mean += annotations.row(j).transpose();
  }
  return mean / static_cast<Real>(n);
}

template <class Real>
SourceContext<Real> make_context(const ModelParams<Real>& params, Matrix<Real> annotations,
                                 const std::vector<std::uint8_t>& mask) {
  SourceContext<Real> src;
  src.mask = mask;
  src.initial_state = (params.init_weight * mean_annotation<Real>(annotations, mask) +
                       params.init_bias).array().tanh().matrix();
  src.projected = annotations * params.att_annotation.transpose();
  src.annotations = std::move(annotations);
  return src;
}

template <class Real>
struct AttentionCache {
  GruCache<Real> pre;
  Matrix<Real> hidden;  // T x H, tanh(A s~ + B h_j + b), zero rows when masked
};

template <class Real>
AttentionResult<Real> attend_impl(const ModelParams<Real>& params, const Vector<Real>& s_prev,
                                  const Vector<Real>& y_prev_embedding,
                                  const SourceContext<Real>& src, AttentionCache<Real>* cache) {
  const Eigen::Index steps = src.annotations.rows();
  if (valid_count<Real>(src.mask) == 0) throw InputError("attention over a fully masked source");
  AttentionResult<Real> out;
  out.s_tilde = gru_forward<Real>(params.decoder_pre, y_prev_embedding, s_prev,
                                  cache ? &cache->pre : nullptr);
  const Vector<Real> query = params.att_state * out.s_tilde + params.att_bias;
  Matrix<Real> hidden = Matrix<Real>::Zero(steps, params.dims.hidden);
  Vector<Real> energy = Vector<Real>::Zero(steps);
  Real max_energy = -std::numeric_limits<Real>::infinity();
  for (Eigen::Index j = 0; j < steps; ++j) {
    if (!src.mask[static_cast<std::size_t>(j)]) continue;
    hidden.row(j) = (query.transpose() + src.projected.row(j)).array().tanh().matrix();
    energy(j) = hidden.row(j).dot(params.att_score.transpose());
    max_energy = std::max(max_energy, energy(j));
  }
  out.weights = Vector<Real>::Zero(steps);
  Real total = 0;
  for (Eigen::Index j = 0; j < steps; ++j) {
    if (!src.mask[static_cast<std::size_t>(j)]) continue;
    out.weights(j) = std::exp(energy(j) - max_energy);
    total += out.weights(j);
  }
  out.weights /= total;
  out.context = src.annotations.transpose() * out.weights;
  if (cache) cache->hidden = std::move(hidden);
  return out;
}

template <class Real>
struct StepCache {
  int y_prev = kBosId;
  int y = kPadId;
  Vector<Real> s_prev;
  Vector<Real> y_embedding;
  AttentionCache<Real> attention;
  AttentionResult<Real> attended;
  GruCache<Real> post;
  Vector<Real> state;
  Vector<Real> readout;       // tanh output before dropout
  Vector<Real> dropout_mask;  // scaled keep mask; empty when dropout is off
  Vector<Real> probs;
};

template <class Real>
StepResult<Real> decode_step_impl(const ModelParams<Real>& params, const Vector<Real>& s_tilde,
                                  const Vector<Real>& context,
                                  const Vector<Real>& y_prev_embedding, const DropoutConfig& dropout,
                                  StepCache<Real>* cache) {
  StepResult<Real> out;
  out.state = gru_forward<Real>(params.decoder_post, context, s_tilde, cache ? &cache->post : nullptr);
  Vector<Real> readout = (params.readout_state * out.state + params.readout_prev * y_prev_embedding +
                          params.readout_context * context + params.readout_bias)
                             .array()
                             .tanh()
                             .matrix();
  Vector<Real> dropped = readout;
  Vector<Real> keep;
  if (dropout.rate > 0.0) {
    if (!dropout.rng) throw ConfigError("dropout requires a random generator");
    std::bernoulli_distribution draw(1.0 - dropout.rate);
    keep.resize(readout.size());
    const Real scale = Real(1.0 / (1.0 - dropout.rate));
    for (Eigen::Index i = 0; i < keep.size(); ++i) keep(i) = draw(*dropout.rng) ? scale : Real(0);
    dropped = readout.cwiseProduct(keep);
  }
  out.logits = params.output_weight * dropped + params.output_bias;
  if (cache) {
    cache->readout = std::move(readout);
    cache->dropout_mask = std::move(keep);
  }
  return out;
}

template <class Real>
void check_target_id(const ModelParams<Real>& params, int id) {
  if (id < 0 || id >= params.dims.target_vocab) {
    throw InputError("target id " + std::to_string(id) + " outside vocabulary of " +
                     std::to_string(params.dims.target_vocab));
  }
}

// Teacher-forced pass over one sentence; returns the summed NLL.
template <class Real>
double sentence_forward(const ModelParams<Real>& params, const EncodedSource& source,
                        const std::vector<std::uint8_t>& source_mask,
                        const std::vector<int>& target, const std::vector<std::uint8_t>& target_mask,
                        const DropoutConfig& dropout, Matrix<Real>* inputs_out,
                        EncoderCache<Real>* enc_cache, SourceContext<Real>* ctx_out,
                        std::vector<StepCache<Real>>* steps) {
  Matrix<Real> inputs = Matrix<Real>::Zero(static_cast<Eigen::Index>(source.size()),
                                           params.input_width());
  for (std::size_t j = 0; j < source.size(); ++j) {
    if (source_mask[j]) {
      inputs.row(static_cast<Eigen::Index>(j)) =
          compose_token(params.setting, source[j], params.source).transpose();
    }
  }
  SourceContext<Real> src =
      make_context(params, encode_impl(params, inputs, source_mask, enc_cache), source_mask);

  double nll = 0.0;
  Vector<Real> s = src.initial_state;
  int y_prev = kBosId;
  for (std::size_t t = 0; t < target.size(); ++t) {
    if (!target_mask[t]) continue;
    const int y = target[t];
    check_target_id(params, y);
    StepCache<Real> local;
    StepCache<Real>* cache = steps ? &local : nullptr;
    const Vector<Real> y_emb = params.target_embedding.row(y_prev).transpose();
    auto attended = attend_impl(params, s, y_emb, src, cache ? &cache->attention : nullptr);
    auto step = decode_step_impl(params, attended.s_tilde, attended.context, y_emb, dropout, cache);
    const Vector<Real> logp = log_softmax<Real>(step.logits);
    nll -= static_cast<double>(logp(y));
    if (cache) {
      cache->y_prev = y_prev;
      cache->y = y;
      cache->s_prev = s;
      cache->y_embedding = y_emb;
      cache->attended = std::move(attended);
      cache->state = step.state;
      cache->probs = logp.array().exp().matrix();
      steps->push_back(std::move(local));
    }
    s = std::move(step.state);
    y_prev = y;
  }
  if (inputs_out) *inputs_out = std::move(inputs);
  if (ctx_out) *ctx_out = std::move(src);
  return nll;
}

template <class Real>
void sentence_backward(const ModelParams<Real>& params, const EncodedSource& source,
                       const Matrix<Real>& inputs, const EncoderCache<Real>& enc_cache,
                       const SourceContext<Real>& src, const std::vector<StepCache<Real>>& steps,
                       Real scale, ModelParams<Real>& g) {
  const int hidden = params.dims.hidden;
  const Eigen::Index src_len = src.annotations.rows();
  Matrix<Real> d_annotations = Matrix<Real>::Zero(src_len, 2 * hidden);
  Matrix<Real> d_projected = Matrix<Real>::Zero(src_len, hidden);
  Vector<Real> ds = Vector<Real>::Zero(hidden);
  Vector<Real> dx;
  Vector<Real> dh;

  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const StepCache<Real>& c = *it;
    Vector<Real> dlogits = c.probs;
    dlogits(c.y) -= Real(1);
    dlogits *= scale;

    Vector<Real> dropped = c.readout;
    if (c.dropout_mask.size()) dropped = dropped.cwiseProduct(c.dropout_mask);
    g.output_weight.noalias() += dlogits * dropped.transpose();
    g.output_bias += dlogits;
    Vector<Real> dreadout = params.output_weight.transpose() * dlogits;
    if (c.dropout_mask.size()) dreadout = dreadout.cwiseProduct(c.dropout_mask);
    const Vector<Real> dpre =
        dreadout.cwiseProduct((Real(1) - c.readout.array().square()).matrix());
    g.readout_state.noalias() += dpre * c.state.transpose();
    g.readout_prev.noalias() += dpre * c.y_embedding.transpose();
    g.readout_context.noalias() += dpre * c.attended.context.transpose();
    g.readout_bias += dpre;

    Vector<Real> d_state = ds + params.readout_state.transpose() * dpre;
    Vector<Real> d_y = params.readout_prev.transpose() * dpre;
    Vector<Real> d_context = params.readout_context.transpose() * dpre;

    // s_t = GRU_post(x = c_t, h = s~)
    gru_backward(params.decoder_post, c.post, d_state, g.decoder_post, dx, dh);
    d_context += dx;
    Vector<Real> d_s_tilde = dh;

    // c_t = sum_j alpha_j h_j
    const Vector<Real>& alpha = c.attended.weights;
    Vector<Real> d_alpha = src.annotations * d_context;
    d_annotations.noalias() += alpha * d_context.transpose();
    Real weighted = 0;
    for (Eigen::Index j = 0; j < src_len; ++j) {
      if (src.mask[static_cast<std::size_t>(j)]) weighted += alpha(j) * d_alpha(j);
    }
    Vector<Real> d_query = Vector<Real>::Zero(hidden);
    for (Eigen::Index j = 0; j < src_len; ++j) {
      if (!src.mask[static_cast<std::size_t>(j)]) continue;
      const Real d_energy = alpha(j) * (d_alpha(j) - weighted);
      const auto z = c.attention.hidden.row(j);
      g.att_score += d_energy * z.transpose();
      const Vector<Real> d_hidden =
          (d_energy * params.att_score.array() * (Real(1) - z.transpose().array().square()))
              .matrix();
      d_projected.row(j) += d_hidden.transpose();
      d_query += d_hidden;
    }
    g.att_state.noalias() += d_query * c.attended.s_tilde.transpose();
    g.att_bias += d_query;
    d_s_tilde.noalias() += params.att_state.transpose() * d_query;

    // s~ = GRU_pre(x = y_prev embedding, h = s_prev)
    gru_backward(params.decoder_pre, c.attention.pre, d_s_tilde, g.decoder_pre, dx, dh);
    d_y += dx;
    g.target_embedding.row(c.y_prev) += d_y.transpose();
    ds = dh;
  }

  // s_0 = tanh(W mean(h) + b)
  const Vector<Real> mean = mean_annotation<Real>(src.annotations, src.mask);
  const Vector<Real> d_init =
      ds.cwiseProduct((Real(1) - src.initial_state.array().square()).matrix());
  g.init_weight.noalias() += d_init * mean.transpose();
  g.init_bias += d_init;
  const Vector<Real> d_mean =
      params.init_weight.transpose() * d_init / static_cast<Real>(valid_count<Real>(src.mask));
  for (Eigen::Index j = 0; j < src_len; ++j) {
    if (src.mask[static_cast<std::size_t>(j)]) d_annotations.row(j) += d_mean.transpose();
  }

  // projected = annotations * B^T
  g.att_annotation.noalias() += d_projected.transpose() * src.annotations;
  d_annotations.noalias() += d_projected * params.att_annotation;

  Matrix<Real> d_inputs = Matrix<Real>::Zero(inputs.rows(), inputs.cols());
  Vector<Real> carry = Vector<Real>::Zero(hidden);
  for (Eigen::Index j = src_len - 1; j >= 0; --j) {
    if (!src.mask[static_cast<std::size_t>(j)]) continue;
    const Vector<Real> dout = d_annotations.row(j).head(hidden).transpose() + carry;
    gru_backward(params.encoder_forward, enc_cache.forward[static_cast<std::size_t>(j)], dout,
                 g.encoder_forward, dx, dh);
    d_inputs.row(j) += dx.transpose();
    carry = dh;
  }
  carry.setZero();
  for (Eigen::Index j = 0; j < src_len; ++j) {
    if (!src.mask[static_cast<std::size_t>(j)]) continue;
    const Vector<Real> dout = d_annotations.row(j).tail(hidden).transpose() + carry;
    gru_backward(params.encoder_backward, enc_cache.backward[static_cast<std::size_t>(j)], dout,
                 g.encoder_backward, dx, dh);
    d_inputs.row(j) += dx.transpose();
    carry = dh;
  }
  for (Eigen::Index j = 0; j < src_len; ++j) {
    if (!src.mask[static_cast<std::size_t>(j)]) continue;
    const Vector<Real> row = d_inputs.row(j).transpose();
    accumulate_token_gradient<Real>(params.setting, source[static_cast<std::size_t>(j)], row,
                                    g.source);
  }
}

template <class Real>
void fill_uniform(Matrix<Real>& m, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Real>(dist(rng));
}

template <class Real>
void fill_orthogonal(Matrix<Real>& m, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd gaussian(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < gaussian.rows(); ++i) {
    for (Eigen::Index j = 0; j < gaussian.cols(); ++j) gaussian(i, j) = dist(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  const Eigen::MatrixXd r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols() && j < r.rows(); ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  m = q.cast<Real>();
}

template <class Real>
void init_gru(GruParams<Real>& p, std::mt19937_64& rng, const InitOptions& options) {
  fill_uniform(p.W_r, rng, options.uniform_scale);
  fill_uniform(p.W_u, rng, options.uniform_scale);
  fill_uniform(p.W_h, rng, options.uniform_scale);
  for (auto* u : {&p.U_r, &p.U_u, &p.U_h}) {
    if (options.orthogonal_recurrent) {
      fill_orthogonal(*u, rng);
    } else {
      fill_uniform(*u, rng, options.uniform_scale);
    }
  }
}

}  // namespace

template <class Real>
GruParams<Real>::GruParams(int input, int hidden)
    : W_r(Matrix<Real>::Zero(hidden, input)),
      W_u(Matrix<Real>::Zero(hidden, input)),
      W_h(Matrix<Real>::Zero(hidden, input)),
      U_r(Matrix<Real>::Zero(hidden, hidden)),
      U_u(Matrix<Real>::Zero(hidden, hidden)),
      U_h(Matrix<Real>::Zero(hidden, hidden)),
      b_r(Vector<Real>::Zero(hidden)),
      b_u(Vector<Real>::Zero(hidden)),
      b_h(Vector<Real>::Zero(hidden)) {}

template <class Real>
ModelParams<Real> ModelParams<Real>::zeros(CompositionSetting setting, const ModelDims& dims) {
  if (dims.embedding < 1 || dims.hidden < 1 || dims.word_vocab < 1 || dims.char_vocab < 1 ||
      dims.radical_vocab < 1 || dims.target_vocab < 1) {
    throw ConfigError("model dimensions and vocabulary sizes must be positive");
  }
  const int d = dims.embedding;
  const int h = dims.hidden;
  const int in = input_dim(setting, d);
  ModelParams p;
  p.setting = setting;
  p.dims = dims;
  p.source.word = Matrix<Real>::Zero(dims.word_vocab, d);
  p.source.character = Matrix<Real>::Zero(dims.char_vocab, d);
  p.source.radical = Matrix<Real>::Zero(dims.radical_vocab, d);
  p.target_embedding = Matrix<Real>::Zero(dims.target_vocab, d);
  p.encoder_forward = GruParams<Real>(in, h);
  p.encoder_backward = GruParams<Real>(in, h);
  p.init_weight = Matrix<Real>::Zero(h, 2 * h);
  p.init_bias = Vector<Real>::Zero(h);
  p.decoder_pre = GruParams<Real>(d, h);
  p.att_state = Matrix<Real>::Zero(h, h);
  p.att_annotation = Matrix<Real>::Zero(h, 2 * h);
  p.att_bias = Vector<Real>::Zero(h);
  p.att_score = Vector<Real>::Zero(h);
  p.decoder_post = GruParams<Real>(2 * h, h);
  p.readout_state = Matrix<Real>::Zero(d, h);
  p.readout_prev = Matrix<Real>::Zero(d, d);
  p.readout_context = Matrix<Real>::Zero(d, 2 * h);
  p.readout_bias = Vector<Real>::Zero(d);
  p.output_weight = Matrix<Real>::Zero(dims.target_vocab, d);
  p.output_bias = Vector<Real>::Zero(dims.target_vocab);
  return p;
}

template <class Real>
std::vector<TensorView<Real>> ModelParams<Real>::tensors() {
  std::vector<TensorView<Real>> out;
  for_each([&](const std::string& name, auto& t) {
    using T = std::decay_t<decltype(t)>;
    TensorView<Real> view{name, t.data(), t.size(), {}};
    if constexpr (T::ColsAtCompileTime == 1) {
      view.shape = {t.rows()};
    } else {
      view.shape = {t.rows(), t.cols()};
    }
    out.push_back(std::move(view));
  });
  return out;
}

template <class Real>
std::vector<TensorView<const Real>> ModelParams<Real>::tensors() const {
  std::vector<TensorView<const Real>> out;
  for (auto& view : const_cast<ModelParams*>(this)->tensors()) {
    out.push_back({view.name, view.data, view.size, view.shape});
  }
  return out;
}

template <class Real>
void ModelParams<Real>::set_zero() {
  for_each([](const std::string&, auto& t) { t.setZero(); });
}

template <class Real>
bool ModelParams<Real>::all_finite() const {
  for (const auto& view : tensors()) {
    for (Eigen::Index i = 0; i < view.size; ++i) {
      if (!std::isfinite(view.data[i])) return false;
    }
  }
  return true;
}

template <class To, class From>
ModelParams<To> cast_params(const ModelParams<From>& from) {
  auto to = ModelParams<To>::zeros(from.setting, from.dims);
  auto dst = to.tensors();
  const auto src = from.tensors();
  for (std::size_t k = 0; k < dst.size(); ++k) {
    for (Eigen::Index i = 0; i < dst[k].size; ++i) dst[k].data[i] = static_cast<To>(src[k].data[i]);
  }
  return to;
}

template <class Real>
ModelParams<Real> init_model(CompositionSetting setting, const ModelDims& dims, std::uint64_t seed,
                             const InitOptions& options) {
  auto p = ModelParams<Real>::zeros(setting, dims);
  std::mt19937_64 rng(seed);
  const double scale = options.uniform_scale;
  fill_uniform(p.source.word, rng, scale);
  fill_uniform(p.source.character, rng, scale);
  fill_uniform(p.source.radical, rng, scale);
  fill_uniform(p.target_embedding, rng, scale);
  init_gru(p.encoder_forward, rng, options);
  init_gru(p.encoder_backward, rng, options);
  fill_uniform(p.init_weight, rng, scale);
  init_gru(p.decoder_pre, rng, options);
  fill_uniform(p.att_state, rng, scale);
  fill_uniform(p.att_annotation, rng, scale);
  Matrix<Real> score(p.att_score.size(), 1);
  fill_uniform(score, rng, scale);
  p.att_score = score.col(0);
  init_gru(p.decoder_post, rng, options);
  fill_uniform(p.readout_state, rng, scale);
  fill_uniform(p.readout_prev, rng, scale);
  fill_uniform(p.readout_context, rng, scale);
  fill_uniform(p.output_weight, rng, scale);
  return p;
}

template <class Real>
Vector<Real> gru_step(const GruParams<Real>& p, const Vector<Real>& x, const Vector<Real>& h) {
  return gru_forward<Real>(p, x, h, nullptr);
}

template <class Real>
Matrix<Real> encode(const ModelParams<Real>& params, const Matrix<Real>& inputs,
                    const std::vector<std::uint8_t>& mask) {
  return encode_impl<Real>(params, inputs, mask, nullptr);
}

template <class Real>
SourceContext<Real> prepare_source(const ModelParams<Real>& params, const Matrix<Real>& inputs,
                                   const std::vector<std::uint8_t>& mask) {
  return make_context(params, encode_impl<Real>(params, inputs, mask, nullptr), mask);
}

template <class Real>
AttentionResult<Real> attend(const ModelParams<Real>& params, const Vector<Real>& s_prev,
                             const Vector<Real>& y_prev_embedding, const SourceContext<Real>& src) {
  return attend_impl<Real>(params, s_prev, y_prev_embedding, src, nullptr);
}

template <class Real>
StepResult<Real> decode_step(const ModelParams<Real>& params, const Vector<Real>& s_tilde,
                             const Vector<Real>& context, const Vector<Real>& y_prev_embedding) {
  return decode_step_impl<Real>(params, s_tilde, context, y_prev_embedding, {}, nullptr);
}

template <class Real>
Vector<Real> log_softmax(const Vector<Real>& logits) {
  const Real max = logits.maxCoeff();
  const Real log_sum = std::log((logits.array() - max).exp().sum()) + max;
  return (logits.array() - log_sum).matrix();
}

template <class Real>
InferenceStep<Real> next_token_distribution(const ModelParams<Real>& params,
                                            const SourceContext<Real>& src,
                                            const Vector<Real>& s_prev, int y_prev) {
  check_target_id(params, y_prev);
  const Vector<Real> y_emb = params.target_embedding.row(y_prev).transpose();
  auto attended = attend(params, s_prev, y_emb, src);
  auto step = decode_step(params, attended.s_tilde, attended.context, y_emb);
  return {std::move(step.state), log_softmax<Real>(step.logits), std::move(attended.weights)};
}

template <class Real>
double sequence_log_prob(const ModelParams<Real>& params, const EncodedSource& source,
                         const std::vector<int>& target) {
  const std::vector<std::uint8_t> mask(source.size(), 1);
  const auto src = prepare_source(params, compose_source(params.setting, source, params.source), mask);
  double total = 0.0;
  Vector<Real> s = src.initial_state;
  int y_prev = kBosId;
  for (const int y : target) {
    check_target_id(params, y);
    auto step = next_token_distribution(params, src, s, y_prev);
    total += static_cast<double>(step.log_probs(y));
    s = std::move(step.state);
    y_prev = y;
  }
  return total;
}

template <class Real>
LossResult batch_loss(const ModelParams<Real>& params, const EncodedBatch& batch,
                      const DropoutConfig& dropout) {
  LossResult result;
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double nll = sentence_forward<Real>(params, batch.source[i], batch.source_mask[i],
                                              batch.target[i], batch.target_mask[i], dropout,
                                              nullptr, nullptr, nullptr, nullptr);
    result.sentence_loss.push_back(nll);
    result.tokens += batch.target_lengths[i];
    total += nll;
  }
  result.mean_loss = result.tokens ? total / static_cast<double>(result.tokens) : 0.0;
  return result;
}

template <class Real>
LossResult batch_gradients(const ModelParams<Real>& params, const EncodedBatch& batch,
                           ModelParams<Real>& grads, const DropoutConfig& dropout) {
  if (grads.dims != params.dims || grads.setting != params.setting) {
    grads = params.zeros_like();
  } else {
    grads.set_zero();
  }
  LossResult result;
  for (std::size_t i = 0; i < batch.size(); ++i) result.tokens += batch.target_lengths[i];
  if (result.tokens == 0) return result;
  const Real scale = Real(1) / static_cast<Real>(result.tokens);
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Matrix<Real> inputs;
    EncoderCache<Real> enc_cache;
    SourceContext<Real> src;
    std::vector<StepCache<Real>> steps;
    const double nll = sentence_forward<Real>(params, batch.source[i], batch.source_mask[i],
                                              batch.target[i], batch.target_mask[i], dropout,
                                              &inputs, &enc_cache, &src, &steps);
    sentence_backward<Real>(params, batch.source[i], inputs, enc_cache, src, steps, scale, grads);
    result.sentence_loss.push_back(nll);
    total += nll;
  }
  result.mean_loss = total / static_cast<double>(result.tokens);
  return result;
}

#define RADNMT_INSTANTIATE(Real)                                                                \
  template struct GruParams<Real>;                                                              \
  template struct ModelParams<Real>;                                                            \
  template ModelParams<Real> init_model(CompositionSetting, const ModelDims&, std::uint64_t,   \
                                        const InitOptions&);                                    \
  template Vector<Real> gru_step(const GruParams<Real>&, const Vector<Real>&,                   \
                                 const Vector<Real>&);                                          \
  template Matrix<Real> encode(const ModelParams<Real>&, const Matrix<Real>&,                   \
                               const std::vector<std::uint8_t>&);                               \
  template SourceContext<Real> prepare_source(const ModelParams<Real>&, const Matrix<Real>&,    \
                                              const std::vector<std::uint8_t>&);                \
  template AttentionResult<Real> attend(const ModelParams<Real>&, const Vector<Real>&,          \
                                        const Vector<Real>&, const SourceContext<Real>&);       \
  template StepResult<Real> decode_step(const ModelParams<Real>&, const Vector<Real>&,          \
                                        const Vector<Real>&, const Vector<Real>&);              \
  template Vector<Real> log_softmax(const Vector<Real>&);                                       \
  template InferenceStep<Real> next_token_distribution(                                         \
      const ModelParams<Real>&, const SourceContext<Real>&, const Vector<Real>&, int);          \
  template double sequence_log_prob(const ModelParams<Real>&, const EncodedSource&,             \
                                    const std::vector<int>&);                                   \
  template LossResult batch_loss(const ModelParams<Real>&, const EncodedBatch&,                 \
                                 const DropoutConfig&);                                         \
  template LossResult batch_gradients(const ModelParams<Real>&, const EncodedBatch&,            \
                                      ModelParams<Real>&, const DropoutConfig&);

RADNMT_INSTANTIATE(float)
RADNMT_INSTANTIATE(double)
#undef RADNMT_INSTANTIATE

template ModelParams<double> cast_params(const ModelParams<float>&);
template ModelParams<float> cast_params(const ModelParams<double>&);
template ModelParams<float> cast_params(const ModelParams<float>&);
template ModelParams<double> cast_params(const ModelParams<double>&);

}  // namespace radnmt
