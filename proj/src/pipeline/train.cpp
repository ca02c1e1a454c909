//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "opforge/error.hpp"
#include "opforge/pipeline.hpp"

namespace opforge::pipeline {
namespace {

using neural::Mat;
using neural::ModelParams;
using smiles::Vocabulary;

// Windows stored back to back for the batched kernels.
struct WindowSet {
  int len = 0;
  std::vector<int> inputs;
  std::vector<int> targets;

  std::size_t size() const { return targets.size(); }

  void add(std::span<const int> ids) {
    for (std::size_t t = 1; t < ids.size(); ++t) {
      for (int k = 0; k < len; ++k) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) - len + k;
        inputs.push_back(src < 0 ? Vocabulary::kPad : ids[src]);
      }
      targets.push_back(ids[t]);
    }
  }
};

int argmax_row(const Mat &m, int row) {
  Eigen::Index best = 0;
  m.row(row).maxCoeff(&best);
  return static_cast<int>(best);
}

Evaluation evaluate_windows(const WindowSet &set, const ModelParams &params) {
  Evaluation e;
  e.windows = set.size();
  if (set.size() == 0) return e;
  neural::BatchTrace trace;
  constexpr std::size_t kChunk = 256;
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < set.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, set.size() - start);
    const std::span<const int> inputs(set.inputs.data() + start * set.len, n * set.len);
    const Mat &probs = neural::forward_batch(inputs, set.len, params, trace);
    for (std::size_t b = 0; b < n; ++b) {
      const int target = set.targets[start + b];
      loss -= std::log(std::max(probs(b, target), 1e-300));
      correct += argmax_row(probs, static_cast<int>(b)) == target ? 1 : 0;
    }
  }
  e.loss = loss / static_cast<double>(set.size());
  e.accuracy = static_cast<double>(correct) / static_cast<double>(set.size());
  return e;
}

struct EpochTotals {
  double loss = 0.0;
  double accuracy = 0.0;
};

// One pass over `set` in shuffled mini-batches; returns running means.
EpochTotals run_epoch(const WindowSet &set, ModelParams &params,
                      neural::AdamState &adam, const neural::AdamOptions &options,
                      int batch_size, Rng &rng) {
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  neural::BatchTrace trace;
  neural::BackwardWorkspace workspace;
  ModelParams grads = params;
  grads.set_zero();
  std::vector<int> inputs, targets;
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t n = std::min<std::size_t>(batch_size, order.size() - start);
    inputs.clear();
    targets.clear();
    for (std::size_t k = start; k < start + n; ++k) {
      const std::size_t w = order[k];
      inputs.insert(inputs.end(), set.inputs.begin() + w * set.len,
                    set.inputs.begin() + (w + 1) * set.len);
      targets.push_back(set.targets[w]);
    }
    grads.set_zero();
    loss += neural::loss_and_backward_batch(inputs, set.len, targets, params, trace,
                                            workspace, grads);
    for (std::size_t b = 0; b < n; ++b)
      correct += argmax_row(trace.probs, static_cast<int>(b)) == targets[b] ? 1 : 0;
    const double scale = 1.0 / static_cast<double>(n);
    for (std::span<double> g : grads.tensors())
      for (double &x : g) x *= scale;
    neural::adam_step(params, grads, adam, options);
  }
  const double count = static_cast<double>(std::max<std::size_t>(1, set.size()));
  return {loss / count, static_cast<double>(correct) / count};
}

void check_batch(int batch_size, int epochs) {
  if (batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  if (epochs < 0) throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 0");
}

}  // namespace

neural::Checkpoint Model::to_checkpoint() const {
  return {config, params, vocab.texts()};
}

Model Model::from_checkpoint(neural::Checkpoint checkpoint) {
  if (static_cast<int>(checkpoint.tokens.size()) != checkpoint.config.vocab_size)
    throw Error(ErrorCode::kShapeMismatch,
                "checkpoint token list does not match its vocabulary size");
  Model m;
  m.config = checkpoint.config;
  m.params = std::move(checkpoint.params);
  m.vocab = Vocabulary::from_texts(std::move(checkpoint.tokens));
  return m;
}

TrainResult train(std::span<const CorpusRecord> records, neural::ModelConfig config,
                  const TrainOptions &options, Rng &rng) {
  check_batch(options.batch_size, options.epochs);
  if (!(options.holdout_fraction >= 0.0 && options.holdout_fraction < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "holdout fraction must be in [0, 1)");

  std::vector<std::vector<smiles::Token>> tokens;
  for (const CorpusRecord &r : records) {
    try {
      tokens.push_back(smiles::tokenize(r.smiles));
    } catch (const Error &) {
    }
  }
  if (tokens.empty()) throw Error(ErrorCode::kEmptyCorpus, "no trainable molecules");

  TrainResult result;
  Model &model = result.model;
  model.vocab = Vocabulary::build(tokens);
  config.vocab_size = model.vocab.size();
  config.validate();
  model.config = config;
  model.params = neural::init_params(config);

  std::vector<std::size_t> order(tokens.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t holdout = 0;
  if (order.size() >= 2 && options.holdout_fraction > 0.0) {
    holdout = static_cast<std::size_t>(
        std::llround(options.holdout_fraction * static_cast<double>(order.size())));
    holdout = std::clamp<std::size_t>(holdout, 1, order.size() - 1);
  }

  WindowSet train_set{config.window_len, {}, {}};
  WindowSet holdout_set{config.window_len, {}, {}};
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::vector<int> ids;
    ids.push_back(Vocabulary::kBos);
    for (int id : model.vocab.encode(tokens[order[k]])) ids.push_back(id);
    ids.push_back(Vocabulary::kEos);
    (k < holdout ? holdout_set : train_set).add(ids);
  }
  const WindowSet &eval_set = holdout ? holdout_set : train_set;
  result.train_windows = train_set.size();
  result.holdout_windows = eval_set.size();

  neural::AdamState adam = neural::AdamState::for_params(model.params);
  ModelParams working = model.params;
  double best = std::numeric_limits<double>::infinity();
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    const EpochTotals totals =
        run_epoch(train_set, working, adam, options.adam, options.batch_size, rng);
    const Evaluation held = evaluate_windows(eval_set, working);
    EpochLog log{epoch, totals.loss, totals.accuracy, held.loss, held.accuracy};
    result.log.push_back(log);
    if (held.loss < best) {
      best = held.loss;
      result.best_epoch = epoch;
      model.params = working;
    }
    if (options.on_epoch) options.on_epoch(log);
  }
  return result;
}

TrainResult train(std::span<const CorpusRecord> records,
                  const neural::ModelConfig &config, int epochs, int batch_size,
                  double holdout_fraction, Rng &rng) {
  TrainOptions options;
  options.epochs = epochs;
  options.batch_size = batch_size;
  options.holdout_fraction = holdout_fraction;
  return train(records, config, options, rng);
}

Model fine_tune(const Model &model, std::span<const std::string> smiles, int epochs,
                int batch_size, const neural::AdamOptions &adam, Rng &rng) {
  check_batch(batch_size, epochs);
  WindowSet set{model.config.window_len, {}, {}};
  for (const std::string &s : smiles) {
    try {
      set.add(encode_smiles(s, model.vocab));
    } catch (const Error &) {
    }
  }
  if (set.size() == 0) throw Error(ErrorCode::kEmptyCorpus, "nothing to fine-tune on");
  Model out = model;
  neural::AdamState state = neural::AdamState::for_params(out.params);
  for (int epoch = 0; epoch < epochs; ++epoch)
    run_epoch(set, out.params, state, adam, batch_size, rng);
  return out;
}

Evaluation evaluate(const Model &model, std::span<const std::string> smiles) {
  WindowSet set{model.config.window_len, {}, {}};
  for (const std::string &s : smiles) set.add(encode_smiles(s, model.vocab));
  return evaluate_windows(set, model.params);
}

}  // namespace opforge::pipeline
