//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "opforge/error.hpp"
#include "opforge/neural.hpp"

namespace opforge::neural {

AdamState AdamState::for_params(const ModelParams &params) {
  AdamState s;
  s.m = params;
  s.m.set_zero();
  s.v = s.m;
  return s;
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, std::int64_t t,
                 const AdamOptions &o) {
  if (grads.size() != params.size() || m.size() != params.size()
      || v.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "adam buffers differ in length");
  }
  if (t < 1) throw Error(ErrorCode::kInvalidArgument, "adam step must be >= 1");
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * grads[i];
    v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * grads[i] * grads[i];
    params[i] -= o.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + o.eps);
  }
}

void adam_step(ModelParams &params, const ModelParams &grads, AdamState &state,
               const AdamOptions &options) {
  if (!params.same_shape(grads) || !params.same_shape(state.m)
      || !params.same_shape(state.v)) {
    throw Error(ErrorCode::kShapeMismatch, "adam_step shapes differ");
  }
  ++state.t;
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  for (std::size_t i = 0; i < p.size(); ++i)
    adam_update(p[i], g[i], m[i], v[i], state.t, options);
}

int sample_next(std::span<const double> probs, double temperature, Rng &rng) {
  if (probs.empty())
    throw Error(ErrorCode::kDegenerateDistribution, "empty distribution");
  if (!(temperature >= 0.0) || !std::isfinite(temperature))
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kDegenerateDistribution,
                  "probability " + std::to_string(p) + " is not a valid weight");
    }
    total += p;
  }
  if (total <= 0.0)
    throw Error(ErrorCode::kDegenerateDistribution, "all probabilities are zero");

  int best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = static_cast<int>(i);
  if (temperature == 0.0) return best;

  // softmax(ln p / tau), shifted by the largest log-probability
  const double top = std::log(probs[best]);
  std::vector<double> w(probs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    w[i] = probs[i] > 0.0 ? std::exp((std::log(probs[i]) - top) / temperature)
                          : 0.0;
    sum += w[i];
  }
  const double u = std::generate_canonical<double, 53>(rng) * sum;
  double acc = 0.0;
  int last_positive = best;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    acc += w[i];
    if (u < acc) return static_cast<int>(i);
  }
  return last_positive;
}

}  // namespace opforge::neural
