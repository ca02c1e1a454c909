//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "opforge/error.hpp"
#include "opforge/neural.hpp"

namespace opforge::neural {
namespace {

// tanh via one vectorized exp; |x| > 20 saturates to +-1 in double anyway.
template <class A>
void tanh_inplace(A &&a) {
  a = (2.0 * a).max(-40.0).min(40.0).exp();
  a = (a - 1.0) / (a + 1.0);
}

template <class A>
void sigmoid_inplace(A &&a) {
  a = 1.0 / (1.0 + (-a).max(-700.0).min(700.0).exp());
}

void check_params(const ModelParams &p) {
  const auto v = p.w_emb.rows(), e = p.w_emb.cols(), a = p.w_q.rows(),
             h = p.w_h.cols();
  const bool ok = p.w_q.cols() == e && p.w_k.rows() == a && p.w_k.cols() == e
                  && p.b_a.size() == a && p.v_a.size() == a
                  && p.w_x.rows() == 4 * h && p.w_x.cols() == e
                  && p.w_h.rows() == 4 * h && p.b_lstm.size() == 4 * h
                  && p.w_out.rows() == v && p.w_out.cols() == h
                  && p.b_out.size() == v && v > 0 && h > 0;
  if (!ok) throw Error(ErrorCode::kShapeMismatch, "inconsistent parameter shapes");
}

void check_ids(std::span<const int> ids, int vocab) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab) {
      throw Error(ErrorCode::kIdOutOfRange,
                  "token id " + std::to_string(ids[i]) + " outside vocabulary of "
                      + std::to_string(vocab),
                  i);
    }
  }
}

void check_target(int target, int vocab) {
  if (target < 0 || target >= vocab) {
    throw Error(ErrorCode::kIdOutOfRange,
                "target id " + std::to_string(target) + " outside vocabulary of "
                    + std::to_string(vocab));
  }
}

// --- attention ---------------------------------------------------------------

void attend(std::span<const int> window, const ModelParams &p, AttentionTrace &tr) {
  const int len = static_cast<int>(window.size());
  tr.window.assign(window.begin(), window.end());
  tr.unmasked.resize(len);
  tr.x.resize(len, p.w_emb.cols());
  for (int i = 0; i < len; ++i) {
    tr.unmasked[i] = window[i] != kPadId;
    tr.x.row(i) = p.w_emb.row(window[i]);
  }

  tr.q_proj.noalias() = tr.x * p.w_q.transpose();
  tr.q_proj.rowwise() += p.b_a.transpose();
  tr.k_proj.noalias() = tr.x * p.w_k.transpose();
  tr.u.resize(static_cast<Eigen::Index>(len) * len, p.w_q.rows());
  for (int i = 0; i < len; ++i) {
    auto block = tr.u.middleRows(static_cast<Eigen::Index>(i) * len, len);
    block = tr.k_proj.rowwise() + tr.q_proj.row(i);
    tanh_inplace(block.array());
  }
  tr.scores.resize(len, len);
  Eigen::Map<Vec>(tr.scores.data(), tr.scores.size()).noalias() = tr.u * p.v_a;

  tr.alpha.setZero(len, len);
  for (int i = 0; i < len; ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < len; ++j)
      if (tr.unmasked[j]) top = std::max(top, tr.scores(i, j));
    if (!std::isfinite(top)) continue;  // nothing to attend to
    double sum = 0.0;
    for (int j = 0; j < len; ++j) {
      if (!tr.unmasked[j]) continue;
      const double w = std::exp(tr.scores(i, j) - top);
      tr.alpha(i, j) = w;
      sum += w;
    }
    tr.alpha.row(i) /= sum;
  }
  tr.x_tilde.noalias() = tr.alpha * tr.x;
}

// d_x_tilde: L x E gradient of the attended inputs.
void attend_backward(const AttentionTrace &tr, const ModelParams &p,
                     const Mat &d_x_tilde, BackwardWorkspace &ws, ModelParams &g) {
  const int len = static_cast<int>(tr.window.size());

  // mixture and softmax Jacobian
  ws.d_alpha.noalias() = d_x_tilde * tr.x.transpose();
  ws.d_x.noalias() = tr.alpha.transpose() * d_x_tilde;
  ws.d_scores.resize(len, len);
  for (int i = 0; i < len; ++i) {
    const double inner = tr.alpha.row(i).dot(ws.d_alpha.row(i));
    ws.d_scores.row(i) = tr.alpha.row(i).array() * (ws.d_alpha.row(i).array() - inner);
  }

  // tanh scoring
  const Eigen::Map<const Vec> d_e(ws.d_scores.data(), ws.d_scores.size());
  g.v_a.noalias() += tr.u.transpose() * d_e;
  ws.d_s = (1.0 - tr.u.array().square()).rowwise() * p.v_a.transpose().array();
  ws.d_s.array().colwise() *= d_e.array();
  g.b_a += ws.d_s.colwise().sum().transpose();
  ws.d_p.resize(len, p.w_q.rows());
  ws.d_k.setZero(len, p.w_q.rows());
  for (int i = 0; i < len; ++i) {
    const auto block = ws.d_s.middleRows(static_cast<Eigen::Index>(i) * len, len);
    ws.d_p.row(i) = block.colwise().sum();
    ws.d_k += block;
  }
  g.w_q.noalias() += ws.d_p.transpose() * tr.x;
  g.w_k.noalias() += ws.d_k.transpose() * tr.x;
  ws.d_x.noalias() += ws.d_p * p.w_q;
  ws.d_x.noalias() += ws.d_k * p.w_k;

  for (int i = 0; i < len; ++i) g.w_emb.row(tr.window[i]) += ws.d_x.row(i);
}

// --- LSTM over time-major rows (row t*B + b) ---------------------------------

void lstm_forward(const Mat &x_tilde, int batch, const ModelParams &p, Mat &gates,
                  Mat &c, Mat &h) {
  const int hid = static_cast<int>(p.w_h.cols());
  const int len = static_cast<int>(x_tilde.rows()) / batch;
  gates.noalias() = x_tilde * p.w_x.transpose();
  gates.rowwise() += p.b_lstm.transpose();
  c.resize(x_tilde.rows(), hid);
  h.resize(x_tilde.rows(), hid);
  for (int t = 0; t < len; ++t) {
    const Eigen::Index r = static_cast<Eigen::Index>(t) * batch;
    auto z = gates.middleRows(r, batch);
    if (t > 0) z.noalias() += h.middleRows(r - batch, batch) * p.w_h.transpose();
    sigmoid_inplace(z.leftCols(2 * hid).array());
    tanh_inplace(z.middleCols(2 * hid, hid).array());
    sigmoid_inplace(z.rightCols(hid).array());

    auto ct = c.middleRows(r, batch);
    ct = z.leftCols(hid).cwiseProduct(z.middleCols(2 * hid, hid));
    if (t > 0) ct += z.middleCols(hid, hid).cwiseProduct(c.middleRows(r - batch, batch));
    auto ht = h.middleRows(r, batch);
    ht = ct;
    tanh_inplace(ht.array());
    ht.array() *= z.rightCols(hid).array();
  }
}

// Consumes ws.d_h (B x H, gradient wrt the last hidden state); leaves the
// gradient wrt the attended inputs in ws.d_x_tilde.
void lstm_backward(const Mat &x_tilde, int batch, const ModelParams &p,
                   const Mat &gates, const Mat &c, const Mat &h,
                   BackwardWorkspace &ws, ModelParams &g) {
  const int hid = static_cast<int>(p.w_h.cols());
  const Eigen::Index rows = x_tilde.rows();
  const int len = static_cast<int>(rows) / batch;
  ws.d_c.setZero(batch, hid);
  ws.d_z.resize(rows, 4 * hid);
  for (int t = len - 1; t >= 0; --t) {
    const Eigen::Index r = static_cast<Eigen::Index>(t) * batch;
    const auto z = gates.middleRows(r, batch);
    const auto gi = z.leftCols(hid).array();
    const auto gf = z.middleCols(hid, hid).array();
    const auto gg = z.middleCols(2 * hid, hid).array();
    const auto go = z.rightCols(hid).array();
    ws.tanh_c = c.middleRows(r, batch);
    tanh_inplace(ws.tanh_c.array());
    const auto tc = ws.tanh_c.array();

    auto dz = ws.d_z.middleRows(r, batch);
    ws.d_c.array() += ws.d_h.array() * go * (1.0 - tc.square());
    dz.rightCols(hid).array() = ws.d_h.array() * tc * go * (1.0 - go);
    dz.leftCols(hid).array() = ws.d_c.array() * gg * gi * (1.0 - gi);
    dz.middleCols(2 * hid, hid).array() = ws.d_c.array() * gi * (1.0 - gg.square());
    if (t > 0) {
      dz.middleCols(hid, hid).array() =
          ws.d_c.array() * c.middleRows(r - batch, batch).array() * gf * (1.0 - gf);
      ws.d_c.array() *= gf;
      ws.d_h.noalias() = dz * p.w_h;
    } else {
      dz.middleCols(hid, hid).setZero();
    }
  }
  ws.h_prev.resize(rows, hid);
  ws.h_prev.topRows(batch).setZero();
  if (len > 1) ws.h_prev.bottomRows(rows - batch) = h.topRows(rows - batch);
  g.w_x.noalias() += ws.d_z.transpose() * x_tilde;
  g.w_h.noalias() += ws.d_z.transpose() * ws.h_prev;
  g.b_lstm += ws.d_z.colwise().sum().transpose();
  ws.d_x_tilde.noalias() = ws.d_z * p.w_x;
}

// Row-wise softmax of logits into probs.
void softmax_rows(const Mat &logits, Mat &probs) {
  probs.resize(logits.rows(), logits.cols());
  for (Eigen::Index b = 0; b < logits.rows(); ++b) {
    const double top = logits.row(b).maxCoeff();
    probs.row(b) = (logits.row(b).array() - top).exp();
    probs.row(b) /= probs.row(b).sum();
  }
}

double cross_entropy(const auto &logits_row, int target) {
  const double top = logits_row.maxCoeff();
  return top + std::log((logits_row.array() - top).exp().sum()) - logits_row(target);
}

}  // namespace

// --- single window -------------------------------------------------------------

const Vec &forward(std::span<const int> window, const ModelParams &params,
                   ForwardTrace &tr) {
  check_params(params);
  if (window.empty()) throw Error(ErrorCode::kShapeMismatch, "empty window");
  check_ids(window, static_cast<int>(params.w_emb.rows()));

  attend(window, params, tr);
  lstm_forward(tr.x_tilde, 1, params, tr.gates, tr.c, tr.h);
  tr.logits.noalias() = params.w_out * tr.h.bottomRows(1).transpose();
  tr.logits += params.b_out;
  const double top = tr.logits.maxCoeff();
  tr.probs = (tr.logits.array() - top).exp();
  tr.probs /= tr.probs.sum();
  return tr.probs;
}

Vec forward(std::span<const int> window, const ModelParams &params) {
  ForwardTrace trace;
  return forward(window, params, trace);
}

double loss_and_backward(std::span<const int> window, int target,
                         const ModelParams &p, ForwardTrace &tr,
                         BackwardWorkspace &ws, ModelParams &g) {
  check_target(target, static_cast<int>(p.w_emb.rows()));
  if (!g.same_shape(p))
    throw Error(ErrorCode::kShapeMismatch, "gradient buffer shape differs");
  forward(window, p, tr);
  const double loss = cross_entropy(tr.logits, target);

  ws.d_logits = tr.probs.transpose();
  ws.d_logits(0, target) -= 1.0;
  const auto h_last = tr.h.bottomRows(1);
  g.w_out.noalias() += ws.d_logits.transpose() * h_last;
  g.b_out += ws.d_logits.transpose();
  ws.d_h.noalias() = ws.d_logits * p.w_out;

  lstm_backward(tr.x_tilde, 1, p, tr.gates, tr.c, tr.h, ws, g);
  attend_backward(tr, p, ws.d_x_tilde, ws, g);
  return loss;
}

LossAndGradients loss_and_backward(std::span<const int> window, int target,
                                   const ModelParams &params) {
  ForwardTrace trace;
  BackwardWorkspace workspace;
  ModelParams grads = params;
  grads.set_zero();
  const double loss = loss_and_backward(window, target, params, trace, workspace, grads);
  return {loss, std::move(grads)};
}

// --- batches -------------------------------------------------------------------

const Mat &forward_batch(std::span<const int> windows, int window_len,
                         const ModelParams &p, BatchTrace &tr) {
  check_params(p);
  if (window_len < 1 || windows.empty() || windows.size() % window_len != 0)
    throw Error(ErrorCode::kShapeMismatch, "batch is not a whole number of windows");
  check_ids(windows, static_cast<int>(p.w_emb.rows()));

  const int batch = static_cast<int>(windows.size()) / window_len;
  tr.batch = batch;
  tr.window_len = window_len;
  if (static_cast<int>(tr.attention.size()) < batch) tr.attention.resize(batch);
  tr.x_tilde.resize(static_cast<Eigen::Index>(window_len) * batch, p.w_emb.cols());
  for (int b = 0; b < batch; ++b) {
    AttentionTrace &at = tr.attention[b];
    attend(windows.subspan(static_cast<std::size_t>(b) * window_len, window_len), p, at);
    for (int t = 0; t < window_len; ++t)
      tr.x_tilde.row(static_cast<Eigen::Index>(t) * batch + b) = at.x_tilde.row(t);
  }
  lstm_forward(tr.x_tilde, batch, p, tr.gates, tr.c, tr.h);
  tr.logits.noalias() = tr.h.bottomRows(batch) * p.w_out.transpose();
  tr.logits.rowwise() += p.b_out.transpose();
  softmax_rows(tr.logits, tr.probs);
  return tr.probs;
}

double loss_and_backward_batch(std::span<const int> windows, int window_len,
                               std::span<const int> targets, const ModelParams &p,
                               BatchTrace &tr, BackwardWorkspace &ws, ModelParams &g) {
  if (!g.same_shape(p))
    throw Error(ErrorCode::kShapeMismatch, "gradient buffer shape differs");
  if (window_len < 1 || targets.size() * window_len != windows.size())
    throw Error(ErrorCode::kShapeMismatch, "one target per window is required");
  const int vocab = static_cast<int>(p.w_emb.rows());
  for (int t : targets) check_target(t, vocab);
  forward_batch(windows, window_len, p, tr);

  const int batch = tr.batch;
  double loss = 0.0;
  ws.d_logits = tr.probs;
  for (int b = 0; b < batch; ++b) {
    loss += cross_entropy(tr.logits.row(b), targets[b]);
    ws.d_logits(b, targets[b]) -= 1.0;
  }
  const auto h_last = tr.h.bottomRows(batch);
  g.w_out.noalias() += ws.d_logits.transpose() * h_last;
  g.b_out += ws.d_logits.colwise().sum().transpose();
  ws.d_h.noalias() = ws.d_logits * p.w_out;

  lstm_backward(tr.x_tilde, batch, p, tr.gates, tr.c, tr.h, ws, g);
  // d_x_tilde is consumed window by window; keep it out of attend_backward's way.
  Mat d_all = std::move(ws.d_x_tilde);
  for (int b = 0; b < batch; ++b) {
    ws.d_window.resize(window_len, d_all.cols());
    for (int t = 0; t < window_len; ++t)
      ws.d_window.row(t) = d_all.row(static_cast<Eigen::Index>(t) * batch + b);
    attend_backward(tr.attention[b], p, ws.d_window, ws, g);
  }
  ws.d_x_tilde = std::move(d_all);
  return loss;
}

}  // namespace opforge::neural
