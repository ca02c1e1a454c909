//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>

#include "opforge/csv.hpp"
#include "opforge/error.hpp"
#include "opforge/pipeline.hpp"

namespace opforge::pipeline {
namespace {

using smiles::Vocabulary;

Rng item_rng(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

std::string fixed6(double v) { return fmt::format("{:.6f}", v); }

}  // namespace

Seed prepare_seed(std::string_view text, const Vocabulary &vocab) {
  Seed seed;
  seed.text = std::string(text);
  try {
    seed.tokens = smiles::tokenize(text);
  } catch (const Error &e) {
    throw Error(ErrorCode::kSeedUntokenizable,
                "seed '" + seed.text + "' does not tokenize: " + e.what());
  }
  if (seed.tokens.empty())
    throw Error(ErrorCode::kSeedUntokenizable, "seed is empty");

  std::set<std::string> elements;
  for (const smiles::Token &t : seed.tokens)
    if (auto e = smiles::token_element(t)) elements.insert(*e);
  std::string missing;
  for (const char *e : {"P", "F", "O", "C"})
    if (!elements.count(e)) missing += std::string(missing.empty() ? "" : ",") + e;
  if (!missing.empty())
    throw Error(ErrorCode::kSeedMissingRequiredElements,
                "seed '" + seed.text + "' lacks element tokens " + missing);

  try {
    seed.ids = vocab.encode(seed.tokens);
  } catch (const Error &e) {
    throw Error(ErrorCode::kSeedUntokenizable,
                "seed '" + seed.text + "' uses tokens outside the vocabulary: " + e.what());
  }

  for (std::size_t k = seed.tokens.size(); k > 0 && !seed.fragment; --k) {
    try {
      const std::span<const smiles::Token> prefix(seed.tokens.data(), k);
      smiles::MolecularGraph g = smiles::parse(smiles::detokenize(prefix));
      if (g.atom_count() <= smiles::kMaxPatternAtoms) seed.fragment = std::move(g);
    } catch (const Error &) {
    }
  }
  return seed;
}

namespace {

// Samples after `prefix` (ids following BOS) until EOS or max_len tokens,
// then scores the text.
GenerationRecord extend(const Model &model, std::span<const int> prefix,
                        const std::string &prefix_text, const GrowOptions &options,
                        Rng &rng, const properties::PropertyTables *tables,
                        const smiles::MolecularGraph *fragment) {
  const int window_len = model.config.window_len;
  std::vector<int> sequence(window_len, Vocabulary::kPad);
  sequence.push_back(Vocabulary::kBos);
  sequence.insert(sequence.end(), prefix.begin(), prefix.end());

  neural::ForwardTrace trace;
  std::vector<double> probs;
  std::string continuation;
  int length = static_cast<int>(prefix.size());
  while (length < options.max_len) {
    const std::span<const int> window(sequence.data() + sequence.size() - window_len,
                                      window_len);
    const neural::Vec &p = neural::forward(window, model.params, trace);
    probs.assign(p.data(), p.data() + p.size());
    probs[Vocabulary::kPad] = 0.0;
    probs[Vocabulary::kBos] = 0.0;
    const int id = neural::sample_next(probs, options.temperature, rng);
    if (id == Vocabulary::kEos) break;
    sequence.push_back(id);
    continuation += model.vocab.text(id);
    ++length;
  }

  GenerationRecord r;
  r.smiles = prefix_text + continuation;
  r.length = length;
  try {
    const smiles::MolecularGraph g = smiles::parse(r.smiles);
    r.valid = smiles::validate(g).valid;
    if (r.valid) {
      r.contains_fragment = fragment && smiles::has_substructure(g, *fragment);
      if (tables) {
        try {
          r.descriptors = properties::descriptors(g, *tables);
          r.qed = properties::qed(*r.descriptors, *tables, options.qed);
        } catch (const Error &) {
          r.descriptors.reset();
        }
      }
    }
  } catch (const Error &) {
    r.valid = false;
  }
  return r;
}

}  // namespace

GenerationRecord grow(const Seed &seed, const Model &model, const GrowOptions &options,
                      Rng &rng, const properties::PropertyTables *tables) {
  if (options.max_len <= static_cast<int>(seed.tokens.size()))
    throw Error(ErrorCode::kInvalidArgument, "max_len must exceed the seed length");
  return extend(model, seed.ids, seed.text, options, rng, tables,
                seed.fragment ? &*seed.fragment : nullptr);
}

GenerationRecord sample_molecule(const Model &model, const GrowOptions &options, Rng &rng,
                                 const properties::PropertyTables *tables) {
  if (options.max_len < 1)
    throw Error(ErrorCode::kInvalidArgument, "max_len must be >= 1");
  return extend(model, {}, "", options, rng, tables, nullptr);
}

GenerationRecord grow(std::string_view seed, const Model &model, const GrowOptions &options,
                      Rng &rng, const properties::PropertyTables *tables) {
  return grow(prepare_seed(seed, model.vocab), model, options, rng, tables);
}

GenerationStats summarize_generation(std::span<const GenerationRecord> records,
                                     int generation) {
  GenerationStats s;
  s.generation = generation;
  s.count = static_cast<int>(records.size());
  if (records.empty()) return s;
  int valid = 0, distinct = 0, scored = 0, scored_unique = 0;
  double sum = 0.0, sum_unique = 0.0;
  for (const GenerationRecord &r : records) {
    valid += r.valid ? 1 : 0;
    distinct += r.duplicate ? 0 : 1;
    if (r.valid && r.qed) {
      sum += *r.qed;
      ++scored;
      if (!r.duplicate) {
        sum_unique += *r.qed;
        ++scored_unique;
      }
    }
  }
  s.validity = static_cast<double>(valid) / s.count;
  s.uniqueness = static_cast<double>(distinct) / s.count;
  if (scored) s.mean_qed = sum / scored;
  if (scored_unique) s.mean_qed_valid_unique = sum_unique / scored_unique;
  return s;
}

Batch generate_batch(std::string_view seed_text, const Model &model, int n,
                     const GrowOptions &options, Rng &rng,
                     const properties::PropertyTables &tables, int generation) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 0");
  const Seed seed = prepare_seed(seed_text, model.vocab);
  const std::uint64_t master = rng();
  Batch batch;
  batch.records.reserve(n);
  std::unordered_set<std::string> seen;
  for (int i = 0; i < n; ++i) {
    Rng local = item_rng(master, static_cast<std::uint64_t>(i));
    GenerationRecord r = grow(seed, model, options, local, &tables);
    r.generation = generation;
    r.id = fmt::format("gen{}-{}", generation, i);
    r.duplicate = !seen.insert(r.smiles).second;
    batch.records.push_back(std::move(r));
  }
  batch.stats = summarize_generation(batch.records, generation);
  return batch;
}

EvolveResult run_generations(const Model &model, const EvolveOptions &options, Rng &rng,
                             const properties::PropertyTables &tables) {
  if (options.generations < 1)
    throw Error(ErrorCode::kInvalidArgument, "generations must be >= 1");
  EvolveResult result;
  result.model = model;
  std::vector<std::string> fine_set;
  std::unordered_set<std::string> in_set;
  for (int g = 1; g <= options.generations; ++g) {
    Batch batch = generate_batch(options.seed, result.model, options.batch_size,
                                 options.grow, rng, tables, g);
    if (options.on_generation) options.on_generation(batch);
    result.stats.push_back(batch.stats);
    for (const GenerationRecord &r : batch.records) {
      if (r.valid && !r.duplicate && r.qed && *r.qed > options.qed_augment_threshold
          && in_set.insert(r.smiles).second)
        fine_set.push_back(r.smiles);
    }
    result.records.insert(result.records.end(),
                          std::make_move_iterator(batch.records.begin()),
                          std::make_move_iterator(batch.records.end()));

    if (g > 3) {
      const auto &prev = result.stats[g - 2].mean_qed;
      const auto &cur = result.stats[g - 1].mean_qed;
      if (prev && cur && *cur - *prev < options.min_improvement) break;
    }
    if (g == options.generations) break;
    if (!fine_set.empty() && options.fine_tune_epochs > 0)
      result.model = fine_tune(result.model, fine_set, options.fine_tune_epochs,
                               options.fine_tune_batch, options.adam, rng);
  }
  result.fine_tune_set = fine_set.size();
  return result;
}

void write_generation_csv(std::ostream &out, std::span<const GenerationRecord> records) {
  out << "generation,smiles,valid,contains_fragment,length,qed,mw,alogp,hba,hbd,psa,"
         "rotb,arom,alerts\n";
  for (const GenerationRecord &r : records) {
    std::vector<std::string> row = {std::to_string(r.generation), r.smiles,
                                    r.valid ? "1" : "0", r.contains_fragment ? "1" : "0",
                                    std::to_string(r.length)};
    row.push_back(r.qed ? fixed6(*r.qed) : "");
    if (r.descriptors) {
      const properties::DescriptorVector &d = *r.descriptors;
      row.insert(row.end(), {fixed6(d.mw), fixed6(d.alogp), std::to_string(d.hba),
                             std::to_string(d.hbd), fixed6(d.psa), std::to_string(d.rotb),
                             std::to_string(d.arom), std::to_string(d.alerts)});
    } else {
      row.resize(row.size() + 8);
    }
    csv::write_row(out, row);
  }
}

void write_stats_csv(std::ostream &out, std::span<const GenerationStats> stats) {
  out << "generation,count,validity,uniqueness,mean_qed,mean_qed_valid_unique\n";
  for (const GenerationStats &s : stats) {
    out << s.generation << ',' << s.count << ',' << fixed6(s.validity) << ','
        << fixed6(s.uniqueness) << ',' << (s.mean_qed ? fixed6(*s.mean_qed) : "") << ','
        << (s.mean_qed_valid_unique ? fixed6(*s.mean_qed_valid_unique) : "") << '\n';
  }
}

}  // namespace opforge::pipeline
