#pragma once

#include "radnmt/model.hpp"

namespace radnmt {

/// Running averages of squared gradients and squared updates, one per
/// parameter coordinate.
template <class Real>
struct AdadeltaState {
  ModelParams<Real> mean_sq_grad;
  ModelParams<Real> mean_sq_update;
  double rho = 0.95;
  double epsilon = 1e-6;

  AdadeltaState() = default;
  AdadeltaState(const ModelParams<Real>& params, double rho, double epsilon);
};

struct UpdateReport {
  double grad_norm = 0.0;  // before clipping
  bool clipped = false;
};

/// Rescales `grads` in place to global norm `clip_norm` when it is larger
/// (clip_norm <= 0 disables), then applies
///   E[g^2]  <- rho E[g^2] + (1 - rho) g^2
///   delta   = -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
///   E[dx^2] <- rho E[dx^2] + (1 - rho) delta^2
///   x       <- x + delta
/// Throws NumericError naming the first tensor with a non-finite gradient.
template <class Real>
UpdateReport adadelta_update(AdadeltaState<Real>& state, ModelParams<Real>& params,
                             ModelParams<Real>& grads, double clip_norm);

extern template struct AdadeltaState<float>;
extern template struct AdadeltaState<double>;
extern template UpdateReport adadelta_update(AdadeltaState<float>&, ModelParams<float>&,
                                             ModelParams<float>&, double);
extern template UpdateReport adadelta_update(AdadeltaState<double>&, ModelParams<double>&,
                                             ModelParams<double>&, double);

}  // namespace radnmt
