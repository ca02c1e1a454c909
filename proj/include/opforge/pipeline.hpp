//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#ifndef OPFORGE_PIPELINE_HPP_
#define OPFORGE_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opforge/neural.hpp"
#include "opforge/properties.hpp"
#include "opforge/smiles.hpp"

namespace opforge::pipeline {

using neural::Rng;

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

struct CorpusRecord {
  std::string smiles;
  std::optional<std::string> id;
  std::optional<double> qed;  // filled by screen_corpus when absent
};

enum class CorpusFormat { kSmi, kCsv };

// "smi" or "csv"; throws Error(kUnknownFormat).
CorpusFormat parse_format(std::string_view name);
// From the file extension (.smi, .csv); throws Error(kUnknownFormat).
CorpusFormat format_for(const std::filesystem::path &path);

struct LoadedCorpus {
  std::vector<CorpusRecord> records;
  int skipped = 0;  // lines that failed to parse, validate or carry a bad qed
};

/// .smi: `SMILES[<whitespace>name]` per line, `#` comments and blank lines
/// ignored. .csv: RFC 4180 with a header naming `smiles` and optionally
/// `qed` and `id`. Lines whose SMILES does not parse and validate are
/// skipped and counted. Throws Error(kIoFailure) or Error(kUnknownFormat)
/// (also for a CSV header without a `smiles` column).
LoadedCorpus load_corpus(const std::filesystem::path &path, CorpusFormat format);
LoadedCorpus load_corpus(const std::filesystem::path &path);

/// Keeps records with QED strictly above `threshold`, computing QED for
/// records without one. Order is preserved. Records that cannot be scored
/// are dropped.
std::vector<CorpusRecord> screen_corpus(std::span<const CorpusRecord> records,
                                        const properties::PropertyTables &tables,
                                        double threshold = 0.65);

// ---------------------------------------------------------------------------
// Windows
// ---------------------------------------------------------------------------

struct TrainingWindow {
  std::vector<int> input;  // exactly L ids
  int target;              // never PAD

  bool operator==(const TrainingWindow &) const = default;
};

/// Stride-1 windows over `ids` (BOS ... EOS): one window per position after
/// BOS, holding the L preceding ids, left-padded with PAD. n ids give n - 1
/// windows. Throws Error(kInvalidArgument) when L < 2.
std::vector<TrainingWindow> make_windows(std::span<const int> ids, int window_len);

// BOS + encoded tokens + EOS. Throws smiles tokenizer errors or
// Error(kUnknownToken).
std::vector<int> encode_smiles(std::string_view smiles,
                               const smiles::Vocabulary &vocab);

// ---------------------------------------------------------------------------
// Model and training
// ---------------------------------------------------------------------------

/// Weights plus the vocabulary that gives token ids their meaning.
struct Model {
  neural::ModelConfig config;
  neural::ModelParams params;
  smiles::Vocabulary vocab;

  neural::Checkpoint to_checkpoint() const;
  // Throws Error(kShapeMismatch) when the token list does not fit the config.
  static Model from_checkpoint(neural::Checkpoint checkpoint);
};

struct EpochLog {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;  // mean cross-entropy per window (nats)
  double train_accuracy = 0.0;
  double holdout_loss = 0.0;
  double holdout_accuracy = 0.0;
};

struct TrainOptions {
  int epochs = 5;
  int batch_size = 64;
  double holdout_fraction = 0.05;
  neural::AdamOptions adam{.lr = 3e-3};
  std::function<void(const EpochLog &)> on_epoch;  // optional progress hook
};

struct TrainResult {
  Model model;              // params at the best holdout loss
  std::vector<EpochLog> log;
  int best_epoch = 0;
  std::size_t train_windows = 0;
  std::size_t holdout_windows = 0;
};

/// Builds the vocabulary from `records`, initializes from config.rng_seed
/// (config.vocab_size is overwritten), splits molecules into train and
/// holdout sets, and runs mini-batch Adam over shuffled windows. Train
/// metrics are running means over the epoch; holdout metrics are evaluated
/// after it. A corpus too small to split uses the training molecules as the
/// holdout. Throws Error(kEmptyCorpus).
TrainResult train(std::span<const CorpusRecord> records, neural::ModelConfig config,
                  const TrainOptions &options, Rng &rng);
TrainResult train(std::span<const CorpusRecord> records,
                  const neural::ModelConfig &config, int epochs, int batch_size,
                  double holdout_fraction, Rng &rng);

/// Continues training `model` on `smiles` with the model's vocabulary and no
/// holdout; returns the final params. Strings with tokens outside the
/// vocabulary are ignored. Throws Error(kEmptyCorpus) when nothing remains.
Model fine_tune(const Model &model, std::span<const std::string> smiles,
                int epochs, int batch_size, const neural::AdamOptions &adam,
                Rng &rng);

/// Mean cross-entropy and accuracy of `model` over the windows of `smiles`.
struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  std::size_t windows = 0;
};
Evaluation evaluate(const Model &model, std::span<const std::string> smiles);

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

inline constexpr std::string_view kDefaultSeed = "COP(=O)(F)";

struct GenerationRecord {
  std::string id;          // gen{g}-{index}
  std::string smiles;
  bool valid = false;      // parses and validates
  bool contains_fragment = false;
  bool duplicate = false;  // an earlier record in the batch has the same text
  int generation = 1;
  int length = 0;          // SMILES tokens, seed included
  std::optional<properties::DescriptorVector> descriptors;
  std::optional<double> qed;
};

struct GenerationStats {
  int generation = 1;
  int count = 0;
  double validity = 0.0;    // valid / count
  double uniqueness = 0.0;  // distinct strings / count
  std::optional<double> mean_qed;               // over scored valid records
  std::optional<double> mean_qed_valid_unique;  // first occurrence of each
};

/// Checked seed: its tokens and the graph of its longest parseable prefix.
struct Seed {
  std::string text;
  std::vector<smiles::Token> tokens;
  std::vector<int> ids;
  std::optional<smiles::MolecularGraph> fragment;
};

/// Throws Error(kSeedUntokenizable) when the seed does not tokenize or uses
/// tokens outside `vocab`, and Error(kSeedMissingRequiredElements) unless
/// its atom tokens include P, F, O and C.
Seed prepare_seed(std::string_view seed, const smiles::Vocabulary &vocab);

struct GrowOptions {
  double temperature = 1.0;
  int max_len = 100;  // SMILES tokens in the output, seed included
  properties::QedOptions qed;
};

/// Extends the seed token by token until EOS or max_len tokens. PAD and BOS
/// are never sampled. Descriptors and QED are filled for valid output.
/// Throws Error(kInvalidArgument) when max_len does not exceed the seed.
GenerationRecord grow(const Seed &seed, const Model &model,
                      const GrowOptions &options, Rng &rng,
                      const properties::PropertyTables *tables = nullptr);
GenerationRecord grow(std::string_view seed, const Model &model,
                      const GrowOptions &options, Rng &rng,
                      const properties::PropertyTables *tables = nullptr);

/// Free sampling from BOS with no seed; contains_fragment stays false.
GenerationRecord sample_molecule(const Model &model, const GrowOptions &options,
                                 Rng &rng,
                                 const properties::PropertyTables *tables = nullptr);

struct Batch {
  std::vector<GenerationRecord> records;
  GenerationStats stats;
};

// Stats over already scored records of one generation.
GenerationStats summarize_generation(std::span<const GenerationRecord> records,
                                     int generation);

/// n grow calls; item i draws from an Rng seeded by (master, i) where master
/// is one draw from `rng`, so the batch is reproducible and order-free.
Batch generate_batch(std::string_view seed, const Model &model, int n,
                     const GrowOptions &options, Rng &rng,
                     const properties::PropertyTables &tables, int generation = 1);

struct EvolveOptions {
  std::string seed{kDefaultSeed};
  int generations = 3;
  int batch_size = 1200;
  GrowOptions grow;
  double qed_augment_threshold = 0.5;
  int fine_tune_epochs = 2;
  int fine_tune_batch = 32;
  neural::AdamOptions adam{.lr = 3e-3};
  double min_improvement = 0.01;  // early stop, checked after generation 3
  std::function<void(const Batch &)> on_generation;  // optional hook
};

struct EvolveResult {
  std::vector<GenerationStats> stats;
  std::vector<GenerationRecord> records;  // every generation, in order
  Model model;                            // after the last fine-tune
  std::size_t fine_tune_set = 0;
};

/// For g = 1..G: generate a batch, then add its valid unique molecules with
/// QED above the threshold to the fine-tuning set and fine-tune on the whole
/// set. No fine-tune follows the last generation. Stops early when mean QED
/// improves by less than min_improvement, from generation 4 on.
EvolveResult run_generations(const Model &model, const EvolveOptions &options,
                             Rng &rng, const properties::PropertyTables &tables);

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

/// Columns generation,smiles,valid,contains_fragment,length,qed,mw,alogp,
/// hba,hbd,psa,rotb,arom,alerts. Flags are 0/1, reals use 6 decimals and
/// descriptor cells are empty for invalid records.
void write_generation_csv(std::ostream &out, std::span<const GenerationRecord> records);

/// Columns generation,count,validity,uniqueness,mean_qed,
/// mean_qed_valid_unique with 6 decimals; absent means are empty.
void write_stats_csv(std::ostream &out, std::span<const GenerationStats> stats);

}  // namespace opforge::pipeline

#endif  // OPFORGE_PIPELINE_HPP_
