#include <doctest.h>

#include <cmath>
#include <limits>

#include "../support/fixtures.hpp"
#include "radnmt/adadelta.hpp"
#include "radnmt/error.hpp"

using namespace radnmt;
using namespace radnmt::testing;

namespace {

ModelParams<double> micro_model() { return init_model<double>(CompositionSetting::WCR, micro_dims(), 11); }

double total_abs(const ModelParams<double>& p) {
  double sum = 0.0;
  for (const auto& t : p.tensors()) {
    for (Eigen::Index i = 0; i < t.size; ++i) sum += std::abs(t.data[i]);
  }
  return sum;
}

}  // namespace

TEST_CASE("zero gradient leaves parameters unchanged and decays accumulators") {
  auto params = micro_model();
  const auto before = params;
  AdadeltaState<double> state(params, 0.95, 1e-6);
  state.mean_sq_grad.output_bias.setConstant(2.0);
  state.mean_sq_update.output_bias.setConstant(4.0);
  auto grads = params.zeros_like();
  adadelta_update(state, params, grads, 1.0);
  for (std::size_t k = 0; k < params.tensors().size(); ++k) {
    const auto a = params.tensors()[k];
    const auto b = before.tensors()[k];
    for (Eigen::Index i = 0; i < a.size; ++i) CHECK(a.data[i] == b.data[i]);
  }
  CHECK(state.mean_sq_grad.output_bias(0) == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(state.mean_sq_update.output_bias(0) == doctest::Approx(3.8).epsilon(1e-15));
}

TEST_CASE("first step with a unit gradient has the hand-computed size") {
  auto params = micro_model();
  const double before = params.output_bias(3);
  AdadeltaState<double> state(params, 0.95, 1e-6);
  auto grads = params.zeros_like();
  grads.output_bias(3) = 1.0;
  const auto report = adadelta_update(state, params, grads, 0.0);
  CHECK_FALSE(report.clipped);
  const double expected = std::sqrt(1e-6) / std::sqrt(0.05 * 1.0 + 1e-6);
  CHECK(before - params.output_bias(3) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(state.mean_sq_update.output_bias(3) == doctest::Approx(0.05 * expected * expected).epsilon(1e-12));
}

TEST_CASE("clipping applies the update of the clipped gradient") {
  auto a = micro_model();
  auto b = a;
  AdadeltaState<double> sa(a, 0.95, 1e-6), sb(b, 0.95, 1e-6);
  auto big = a.zeros_like();
  big.output_bias(0) = 30.0;
  big.readout_bias(1) = 40.0;  // norm 50
  auto clipped = a.zeros_like();
  clipped.output_bias(0) = 0.6;
  clipped.readout_bias(1) = 0.8;  // norm 1
  const auto report = adadelta_update(sa, a, big, 1.0);
  adadelta_update(sb, b, clipped, 1.0);
  CHECK(report.clipped);
  CHECK(report.grad_norm == doctest::Approx(50.0));
  CHECK(a.output_bias(0) == doctest::Approx(b.output_bias(0)).epsilon(1e-14));
  CHECK(a.readout_bias(1) == doctest::Approx(b.readout_bias(1)).epsilon(1e-14));
}

TEST_CASE("accumulators stay non-negative over many steps") {
  auto params = micro_model();
  AdadeltaState<double> state(params, 0.95, 1e-6);
  std::mt19937_64 rng(3);
  const auto batch = random_batch(rng, 3, params.dims);
  ModelParams<double> grads;
  const double start = batch_loss(params, batch).mean_loss;
  for (int step = 0; step < 40; ++step) {
    batch_gradients(params, batch, grads);
    adadelta_update(state, params, grads, 1.0);
  }
  CHECK(batch_loss(params, batch).mean_loss < start);
  for (const auto& t : state.mean_sq_grad.tensors()) {
    for (Eigen::Index i = 0; i < t.size; ++i) CHECK(t.data[i] >= 0.0);
  }
  CHECK(total_abs(params) > 0.0);
}

TEST_CASE("non-finite gradients and bad hyperparameters are rejected") {
  auto params = micro_model();
  AdadeltaState<double> state(params, 0.95, 1e-6);
  auto grads = params.zeros_like();
  grads.decoder_post.U_h(0, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    adadelta_update(state, params, grads, 1.0);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("decoder.post.U_h") != std::string::npos);
  }
  CHECK_THROWS_AS(AdadeltaState<double>(params, 1.0, 1e-6), ConfigError);
  CHECK_THROWS_AS(AdadeltaState<double>(params, 0.95, 0.0), ConfigError);
}
