#include "radnmt/adadelta.hpp"

#include <cmath>

#include "radnmt/error.hpp"

namespace radnmt {

template <class Real>
AdadeltaState<Real>::AdadeltaState(const ModelParams<Real>& params, double rho_, double epsilon_)
    : mean_sq_grad(params.zeros_like()),
      mean_sq_update(params.zeros_like()),
      rho(rho_),
      epsilon(epsilon_) {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("Adadelta rho must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("Adadelta epsilon must be positive");
}

template <class Real>
UpdateReport adadelta_update(AdadeltaState<Real>& state, ModelParams<Real>& params,
                             ModelParams<Real>& grads, double clip_norm) {
  auto g = grads.tensors();
  auto x = params.tensors();
  auto eg = state.mean_sq_grad.tensors();
  auto ex = state.mean_sq_update.tensors();
  if (g.size() != x.size() || eg.size() != x.size() || ex.size() != x.size()) {
    throw ShapeError("Adadelta state does not match the parameter set");
  }
  UpdateReport report;
  double sq_norm = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k].shape != x[k].shape || eg[k].shape != x[k].shape || ex[k].shape != x[k].shape) {
      throw ShapeError("gradient shape mismatch for " + x[k].name);
    }
    for (Eigen::Index i = 0; i < g[k].size; ++i) {
      const double v = static_cast<double>(g[k].data[i]);
      if (!std::isfinite(v)) throw NumericError("non-finite gradient in tensor " + g[k].name);
      sq_norm += v * v;
    }
  }
  report.grad_norm = std::sqrt(sq_norm);
  if (clip_norm > 0.0 && report.grad_norm > clip_norm) {
    report.clipped = true;
    const Real factor = static_cast<Real>(clip_norm / report.grad_norm);
    for (auto& t : g) {
      for (Eigen::Index i = 0; i < t.size; ++i) t.data[i] *= factor;
    }
  }
  const Real rho = static_cast<Real>(state.rho);
  const Real eps = static_cast<Real>(state.epsilon);
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (Eigen::Index i = 0; i < g[k].size; ++i) {
      const Real grad = g[k].data[i];
      Real& acc_g = eg[k].data[i];
      Real& acc_x = ex[k].data[i];
      acc_g = rho * acc_g + (Real(1) - rho) * grad * grad;
      const Real delta = -std::sqrt(acc_x + eps) / std::sqrt(acc_g + eps) * grad;
      acc_x = rho * acc_x + (Real(1) - rho) * delta * delta;
      x[k].data[i] += delta;
    }
  }
  return report;
}

template struct AdadeltaState<float>;
template struct AdadeltaState<double>;
template UpdateReport adadelta_update(AdadeltaState<float>&, ModelParams<float>&,
                                      ModelParams<float>&, double);
template UpdateReport adadelta_update(AdadeltaState<double>&, ModelParams<double>&,
                                      ModelParams<double>&, double);

}  // namespace radnmt
