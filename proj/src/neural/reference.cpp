//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <vector>

#include "opforge/error.hpp"
#include "opforge/neural.hpp"

namespace opforge::neural {
namespace {

using Real = long double;
using RVec = std::vector<Real>;

Real sigmoid(Real x) { return 1.0L / (1.0L + std::exp(-x)); }

// y = M x for a row-major matrix stored in a flat buffer.
RVec matvec(std::span<const double> m, int rows, int cols, const RVec &x) {
  RVec y(rows, 0.0L);
  for (int r = 0; r < rows; ++r) {
    Real s = 0.0L;
    for (int c = 0; c < cols; ++c) s += static_cast<Real>(m[r * cols + c]) * x[c];
    y[r] = s;
  }
  return y;
}

}  // namespace

long double reference_loss(std::span<const int> window, int target,
                           const ModelParams &p) {
  const int vocab = static_cast<int>(p.w_emb.rows());
  const int emb = static_cast<int>(p.w_emb.cols());
  const int att = static_cast<int>(p.w_q.rows());
  const int hid = static_cast<int>(p.w_h.cols());
  const int len = static_cast<int>(window.size());
  if (target < 0 || target >= vocab)
    throw Error(ErrorCode::kIdOutOfRange, "target outside vocabulary");
  for (int id : window)
    if (id < 0 || id >= vocab)
      throw Error(ErrorCode::kIdOutOfRange, "window id outside vocabulary");

  const auto t = p.tensors();
  const auto w_emb = t[0], w_q = t[1], w_k = t[2], b_a = t[3], v_a = t[4],
             w_x = t[5], w_h = t[6], b_lstm = t[7], w_out = t[8], b_out = t[9];

  std::vector<RVec> x(len, RVec(emb));
  for (int i = 0; i < len; ++i)
    for (int e = 0; e < emb; ++e) x[i][e] = w_emb[window[i] * emb + e];

  std::vector<RVec> q(len), k(len);
  for (int i = 0; i < len; ++i) {
    q[i] = matvec(w_q, att, emb, x[i]);
    k[i] = matvec(w_k, att, emb, x[i]);
  }

  std::vector<RVec> mixed(len, RVec(emb, 0.0L));
  for (int i = 0; i < len; ++i) {
    RVec score(len, 0.0L);
    Real top = -INFINITY;
    for (int j = 0; j < len; ++j) {
      if (window[j] == kPadId) continue;
      Real s = 0.0L;
      for (int a = 0; a < att; ++a)
        s += static_cast<Real>(v_a[a]) * std::tanh(q[i][a] + k[j][a] + b_a[a]);
      score[j] = s;
      top = std::max(top, s);
    }
    if (!std::isfinite(top)) continue;
    Real sum = 0.0L;
    RVec w(len, 0.0L);
    for (int j = 0; j < len; ++j) {
      if (window[j] == kPadId) continue;
      w[j] = std::exp(score[j] - top);
      sum += w[j];
    }
    for (int j = 0; j < len; ++j)
      for (int e = 0; e < emb; ++e) mixed[i][e] += w[j] / sum * x[j][e];
  }

  RVec h(hid, 0.0L), c(hid, 0.0L);
  for (int step = 0; step < len; ++step) {
    const RVec zx = matvec(w_x, 4 * hid, emb, mixed[step]);
    const RVec zh = matvec(w_h, 4 * hid, hid, h);
    for (int u = 0; u < hid; ++u) {
      auto z = [&](int block) {
        const int r = block * hid + u;
        return zx[r] + zh[r] + static_cast<Real>(b_lstm[r]);
      };
      const Real ig = sigmoid(z(0)), fg = sigmoid(z(1)), gg = std::tanh(z(2)),
                 og = sigmoid(z(3));
      c[u] = fg * c[u] + ig * gg;
      h[u] = og * std::tanh(c[u]);
    }
  }

  RVec logits = matvec(w_out, vocab, hid, h);
  Real top = -INFINITY;
  for (int v = 0; v < vocab; ++v) {
    logits[v] += b_out[v];
    top = std::max(top, logits[v]);
  }
  Real sum = 0.0L;
  for (int v = 0; v < vocab; ++v) sum += std::exp(logits[v] - top);
  return top + std::log(sum) - logits[target];
}

double gradient_error(std::span<const int> window, int target,
                      const ModelParams &params, const ModelParams &grads,
                      double eps) {
  if (!grads.same_shape(params))
    throw Error(ErrorCode::kShapeMismatch, "gradient shape differs from params");
  ModelParams probe = params;
  auto probe_t = probe.tensors();
  const auto grad_t = grads.tensors();
  double worst = 0.0;
  for (std::size_t ti = 0; ti < probe_t.size(); ++ti) {
    for (std::size_t k = 0; k < probe_t[ti].size(); ++k) {
      double &w = probe_t[ti][k];
      const double saved = w;
      w = saved + eps;
      const long double up = reference_loss(window, target, probe);
      w = saved - eps;
      const long double down = reference_loss(window, target, probe);
      w = saved;
      // the step actually taken, after rounding of saved +- eps
      const long double step = static_cast<long double>(saved + eps)
                               - static_cast<long double>(saved - eps);
      const double numeric = static_cast<double>((up - down) / step);
      const double analytic = grad_t[ti][k];
      const double err = std::abs(analytic - numeric)
                         / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

double grad_check(const ModelConfig &config, int trials, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    ModelParams params = init_params(config, rng);
    // Perturb every tensor, biases included, so no coordinate sits in a
    // trivially zero-gradient region.
    std::normal_distribution<double> noise(0.0, 0.3);
    for (auto t : params.tensors())
      for (double &w : t) w += noise(rng);

    std::uniform_int_distribution<int> token(1, config.vocab_size - 1);
    std::uniform_int_distribution<int> pads(0, config.window_len - 1);
    std::vector<int> window(config.window_len, kPadId);
    const int n_pad = config.vocab_size > 1 ? pads(rng) : 0;
    for (int i = n_pad; i < config.window_len; ++i)
      window[i] = config.vocab_size > 1 ? token(rng) : 0;
    const int target =
        std::uniform_int_distribution<int>(0, config.vocab_size - 1)(rng);

    const LossAndGradients lg = loss_and_backward(window, target, params);
    worst = std::max(worst, gradient_error(window, target, params, lg.grads));
  }
  return worst;
}

}  // namespace opforge::neural
