//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#ifndef OPFORGE_NEURAL_HPP_
#define OPFORGE_NEURAL_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace opforge::neural {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using Rng = std::mt19937_64;

inline constexpr int kPadId = 0;

struct ModelConfig {
  int vocab_size = 0;
  int embed_dim = 64;
  int attention_dim = 64;
  int hidden_dim = 256;
  int window_len = 40;
  std::uint64_t rng_seed = 0;

  /// Throws Error(kInvalidConfig) when a dimension is < 1 or window_len < 2.
  void validate() const;

  bool operator==(const ModelConfig &) const = default;
};

inline constexpr std::array<std::string_view, 10> kTensorNames = {
  "W_emb", "W_q", "W_k", "b_a", "v_a", "W_x", "W_h", "b_lstm", "W_out", "b_out",
};

/// All learned weights. LSTM row blocks of W_x, W_h and b_lstm are ordered
/// input, forget, cell-candidate, output.
struct ModelParams {
  Mat w_emb;   // V x E
  Mat w_q;     // A x E
  Mat w_k;     // A x E
  Vec b_a;     // A
  Vec v_a;     // A
  Mat w_x;     // 4H x E
  Mat w_h;     // 4H x H
  Vec b_lstm;  // 4H
  Mat w_out;   // V x H
  Vec b_out;   // V

  static ModelParams zeros(const ModelConfig &config);

  /// Flat views of every tensor in declaration order (see kTensorNames).
  std::array<std::span<double>, 10> tensors();
  std::array<std::span<const double>, 10> tensors() const;

  std::size_t parameter_count() const;
  bool same_shape(const ModelParams &other) const;
  bool all_finite() const;
  void set_zero();
  ModelConfig shape() const;

  bool operator==(const ModelParams &other) const;
};

/// Attention weights: Normal(0, 0.05^2); biases zero; embedding, LSTM and
/// output matrices Glorot-uniform. Deterministic for a given rng state.
ModelParams init_params(const ModelConfig &config, Rng &rng);
/// Same, seeded from config.rng_seed.
ModelParams init_params(const ModelConfig &config);

/// Attention-stage intermediates of one window.
struct AttentionTrace {
  std::vector<int> window;
  std::vector<char> unmasked;  // 1 where the window position is not PAD
  Mat x;                       // L x E embeddings
  Mat q_proj;                  // L x A, Wq x_i + b_a
  Mat k_proj;                  // L x A, Wk x_j
  Mat u;                       // (L*L) x A, row i*L+j = tanh(Wq x_i + Wk x_j + b_a)
  Mat scores;                  // L x L
  Mat alpha;                   // L x L attention weights
  Mat x_tilde;                 // L x E attended inputs
};

/// Intermediates of one forward pass, kept for backpropagation. Buffers are
/// reused across calls when shapes do not change.
struct ForwardTrace : AttentionTrace {
  Mat gates;   // L x 4H activated gates (i, f, g, o)
  Mat c;       // L x H cell states
  Mat h;       // L x H hidden states
  Vec logits;  // V
  Vec probs;   // V
};

/// Next-token distribution for a window of exactly L ids. PAD positions get
/// zero attention weight; a window that is all PAD attends to nothing.
/// Throws Error(kIdOutOfRange) or Error(kShapeMismatch).
Vec forward(std::span<const int> window, const ModelParams &params);
const Vec &forward(std::span<const int> window, const ModelParams &params,
                   ForwardTrace &trace);

/// Scratch buffers for the backward pass.
struct BackwardWorkspace {
  Mat d_z, d_x, d_x_tilde, d_window, d_alpha, d_scores, d_s, d_p, d_k;
  Mat h_prev, tanh_c, d_h, d_c, d_logits, logits;
};

/// Cross-entropy -ln p(target) of one window. Gradients are *added* into
/// grads, which must already have the shapes of params.
double loss_and_backward(std::span<const int> window, int target,
                         const ModelParams &params, ForwardTrace &trace,
                         BackwardWorkspace &workspace, ModelParams &grads);

/// Intermediates for B windows evaluated together. LSTM rows are time-major:
/// row t*B + b holds step t of window b.
struct BatchTrace {
  int batch = 0;
  int window_len = 0;
  std::vector<AttentionTrace> attention;
  Mat x_tilde;  // (L*B) x E
  Mat gates;    // (L*B) x 4H
  Mat c;        // (L*B) x H
  Mat h;        // (L*B) x H
  Mat logits;   // B x V
  Mat probs;    // B x V
};

/// Same model as forward() over B = windows.size() / window_len windows
/// stored back to back. Returns the B x V probability rows.
const Mat &forward_batch(std::span<const int> windows, int window_len,
                         const ModelParams &params, BatchTrace &trace);

/// Sum over the batch of -ln p(target_b); gradients of that sum are added
/// into grads. Equal to calling loss_and_backward per window.
double loss_and_backward_batch(std::span<const int> windows, int window_len,
                               std::span<const int> targets,
                               const ModelParams &params, BatchTrace &trace,
                               BackwardWorkspace &workspace, ModelParams &grads);

struct LossAndGradients {
  double loss;
  ModelParams grads;
};
LossAndGradients loss_and_backward(std::span<const int> window, int target,
                                   const ModelParams &params);

/// Loss only, evaluated with plain scalar loops in extended precision.
/// Shares no code with forward(); used as the finite-difference oracle.
long double reference_loss(std::span<const int> window, int target,
                           const ModelParams &params);

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  ModelParams m;
  ModelParams v;
  std::int64_t t = 0;

  static AdamState for_params(const ModelParams &params);
};

/// Bias-corrected Adam update on flat buffers; t is the step number after
/// incrementing (t >= 1). Throws Error(kShapeMismatch) on length mismatch.
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, std::int64_t t,
                 const AdamOptions &options);

/// One Adam step over every tensor. Throws Error(kShapeMismatch).
void adam_step(ModelParams &params, const ModelParams &grads, AdamState &state,
               const AdamOptions &options = {});

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// temperature == 0 returns the argmax (lowest id on ties); otherwise draws
/// from softmax(ln p / temperature). Throws Error(kDegenerateDistribution)
/// for negative, non-finite or all-zero probabilities.
int sample_next(std::span<const double> probs, double temperature, Rng &rng);

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  std::vector<std::string> tokens;  // vocabulary texts by id, may be empty
};

/// "OPF1", u32 header length, header text, little-endian doubles in tensor
/// order, CRC32 of all preceding bytes.
std::string checkpoint_bytes(const Checkpoint &checkpoint);
Checkpoint checkpoint_from_bytes(std::string_view bytes);

/// Throws Error(kIoFailure).
void save_checkpoint(const Checkpoint &checkpoint,
                     const std::filesystem::path &path);
/// Throws Error(kIoFailure), Error(kVersionMismatch) or
/// Error(kChecksumMismatch).
Checkpoint load_checkpoint(const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// Gradient checking
// ---------------------------------------------------------------------------

/// Worst |g - g_fd| / max(1e-8, |g| + |g_fd|) over every coordinate, with
/// g_fd the central difference of reference_loss at step eps.
double gradient_error(std::span<const int> window, int target,
                      const ModelParams &params, const ModelParams &grads,
                      double eps = 1e-5);

/// Runs `trials` random (params, window, target) draws for one config and
/// returns the worst gradient_error. Intended for small configs only.
double grad_check(const ModelConfig &config, int trials, std::uint64_t seed);

}  // namespace opforge::neural

#endif  // OPFORGE_NEURAL_HPP_
