#pragma once

// Central finite-difference check of batch_gradients in double precision.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "radnmt/model.hpp"

namespace radnmt::testing {

struct CoordinateCheck {
  std::string tensor;
  Eigen::Index index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

inline double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Rows of the source/target tables actually touched by the batch; other rows
// have an identically zero gradient, so they are sampled from the used set.
inline std::set<int> used_rows(const std::string& tensor, const EncodedBatch& batch) {
  std::set<int> rows;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (std::size_t j = 0; j < batch.source_lengths[i]; ++j) {
      const auto& tok = batch.source[i][j];
      if (tensor == "source.word") rows.insert(tok.word);
      if (tensor == "source.character") rows.insert(tok.characters.begin(), tok.characters.end());
      if (tensor == "source.radical") rows.insert(tok.radicals.begin(), tok.radicals.end());
    }
    if (tensor == "target.embedding") {
      rows.insert(kBosId);
      for (std::size_t t = 0; t + 1 < batch.target_lengths[i]; ++t) rows.insert(batch.target[i][t]);
    }
  }
  return rows;
}

inline std::vector<CoordinateCheck> check_gradients(ModelParams<double> params,
                                                    const EncodedBatch& batch,
                                                    std::size_t per_tensor, std::uint64_t seed,
                                                    double step = 1e-5) {
  ModelParams<double> grads;
  batch_gradients(params, batch, grads);
  const auto grad_views = grads.tensors();
  auto param_views = params.tensors();
  std::mt19937_64 rng(seed);
  std::vector<CoordinateCheck> out;
  for (std::size_t k = 0; k < param_views.size(); ++k) {
    auto& view = param_views[k];
    std::vector<Eigen::Index> candidates;
    const auto rows = used_rows(view.name, batch);
    if (!rows.empty()) {
      const Eigen::Index width = view.shape[1];
      for (const int r : rows) {
        for (Eigen::Index c = 0; c < width; ++c) candidates.push_back(r * width + c);
      }
    } else {
      for (Eigen::Index i = 0; i < view.size; ++i) candidates.push_back(i);
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    candidates.resize(std::min(candidates.size(), per_tensor));
    for (const auto index : candidates) {
      double& x = view.data[index];
      const double saved = x;
      x = saved + step;
      const double plus = batch_loss(params, batch).mean_loss;
      x = saved - step;
      const double minus = batch_loss(params, batch).mean_loss;
      x = saved;
      CoordinateCheck check;
      check.tensor = view.name;
      check.index = index;
      check.analytic = grad_views[k].data[index];
      check.numeric = (plus - minus) / (2.0 * step);
      check.relative_error = relative_error(check.analytic, check.numeric);
      out.push_back(check);
    }
  }
  return out;
}

}  // namespace radnmt::testing
