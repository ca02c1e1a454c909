//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <string>

#include "opforge/error.hpp"
#include "opforge/neural.hpp"

namespace opforge::neural {

void ModelConfig::validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
  };
  require(vocab_size >= 1, "vocab_size must be >= 1");
  require(embed_dim >= 1, "embed_dim must be >= 1");
  require(attention_dim >= 1, "attention_dim must be >= 1");
  require(hidden_dim >= 1, "hidden_dim must be >= 1");
  require(window_len >= 2, "window_len must be >= 2");
}

ModelParams ModelParams::zeros(const ModelConfig &config) {
  config.validate();
  const int v = config.vocab_size, e = config.embed_dim,
            a = config.attention_dim, h = config.hidden_dim;
  ModelParams p;
  p.w_emb = Mat::Zero(v, e);
  p.w_q = Mat::Zero(a, e);
  p.w_k = Mat::Zero(a, e);
  p.b_a = Vec::Zero(a);
  p.v_a = Vec::Zero(a);
  p.w_x = Mat::Zero(4 * h, e);
  p.w_h = Mat::Zero(4 * h, h);
  p.b_lstm = Vec::Zero(4 * h);
  p.w_out = Mat::Zero(v, h);
  p.b_out = Vec::Zero(v);
  return p;
}

namespace {

template <class M>
std::span<double> view(M &m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

template <class M>
std::span<const double> view(const M &m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

}  // namespace

std::array<std::span<double>, 10> ModelParams::tensors() {
  return {view(w_emb), view(w_q),  view(w_k),    view(b_a),   view(v_a),
          view(w_x),   view(w_h),  view(b_lstm), view(w_out), view(b_out)};
}

std::array<std::span<const double>, 10> ModelParams::tensors() const {
  return {view(w_emb), view(w_q),  view(w_k),    view(b_a),   view(v_a),
          view(w_x),   view(w_h),  view(b_lstm), view(w_out), view(b_out)};
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (auto t : tensors()) n += t.size();
  return n;
}

bool ModelParams::same_shape(const ModelParams &o) const {
  auto same = [](const auto &x, const auto &y) {
    return x.rows() == y.rows() && x.cols() == y.cols();
  };
  return same(w_emb, o.w_emb) && same(w_q, o.w_q) && same(w_k, o.w_k)
         && same(b_a, o.b_a) && same(v_a, o.v_a) && same(w_x, o.w_x)
         && same(w_h, o.w_h) && same(b_lstm, o.b_lstm)
         && same(w_out, o.w_out) && same(b_out, o.b_out);
}

bool ModelParams::all_finite() const {
  for (auto t : tensors())
    for (double x : t)
      if (!std::isfinite(x)) return false;
  return true;
}

void ModelParams::set_zero() {
  for (auto t : tensors()) std::fill(t.begin(), t.end(), 0.0);
}

ModelConfig ModelParams::shape() const {
  ModelConfig c;
  c.vocab_size = static_cast<int>(w_emb.rows());
  c.embed_dim = static_cast<int>(w_emb.cols());
  c.attention_dim = static_cast<int>(w_q.rows());
  c.hidden_dim = static_cast<int>(w_h.cols());
  c.window_len = 0;
  return c;
}

bool ModelParams::operator==(const ModelParams &o) const {
  if (!same_shape(o)) return false;
  const auto a = tensors();
  const auto b = o.tensors();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::equal(a[i].begin(), a[i].end(), b[i].begin())) return false;
  return true;
}

ModelParams init_params(const ModelConfig &config, Rng &rng) {
  ModelParams p = ModelParams::zeros(config);

  auto glorot = [&rng](Mat &m) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  };
  auto normal = [&rng](auto &m) {
    std::normal_distribution<double> dist(0.0, 0.05);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  };

  glorot(p.w_emb);
  normal(p.w_q);
  normal(p.w_k);
  normal(p.v_a);
  glorot(p.w_x);
  glorot(p.w_h);
  glorot(p.w_out);
  return p;
}

ModelParams init_params(const ModelConfig &config) {
  Rng rng(config.rng_seed);
  return init_params(config, rng);
}

}  // namespace opforge::neural
