//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include "opforge/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "opforge/csv.hpp"
#include "opforge/error.hpp"
#include "opforge/pipeline.hpp"
#include "opforge/report.hpp"

namespace opforge::cli {
namespace {

namespace fs = std::filesystem;
using pipeline::Rng;

// Every tunable, with the desk-scale defaults.
struct RunConfig {
  // files
  std::string input;
  std::string output;
  std::string format;
  std::string checkpoint;
  std::string save_checkpoint;
  std::string records;
  std::string opera;
  std::string vina_dir;
  std::string plot_dir;
  std::string data_dir;
  // corpus
  double qed_threshold = 0.65;
  // model
  int embed_dim = 32;
  int attention_dim = 16;
  int hidden_dim = 64;
  int window_len = 24;
  // training
  int epochs = 5;
  int batch_size = 64;
  double holdout_fraction = 0.05;
  double lr = 3e-3;
  // generation
  std::string seed{pipeline::kDefaultSeed};
  std::uint64_t rng_seed = 7;
  int n = 1200;
  int generation = 1;
  double temperature = 1.0;
  int max_len = 100;
  // evolve
  int generations = 3;
  double qed_augment_threshold = 0.5;
  int fine_tune_epochs = 2;
  int fine_tune_batch = 32;
  double min_improvement = 0.01;
  // report
  std::string opera_id = "MoleculeID";
  std::string opera_logp = "LogP_pred";
  std::string opera_clearance = "Clint_pred";
  std::string opera_caco2 = "CACO2_pred";
  std::string plot_fields = "mw,alogp,hba,hbd,psa,rotb,arom,alerts";
  std::string reference_name = "sarin";
  double reference_affinity = 12.0;
  double affinity_low = 4.0;
  double affinity_high = 6.0;
  // logging
  std::string log_level = "info";
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string quoted(const std::string &v) {
  if (!v.empty() && v.find_first_of(" \t\"=") == std::string::npos) return v;
  std::string q = "\"";
  for (char c : v) q += c == '"' ? std::string("\\\"") : std::string(1, c);
  return q + "\"";
}

std::string kv(std::string_view key, const std::string &value) {
  return fmt::format("{}={}", key, quoted(value));
}

// Option registry: binds a flag and config key to a field and remembers how
// to print it for the config echo.
class Options {
 public:
  explicit Options(CLI::App &app) : app_(app) {}

  template <typename T>
  void add(const std::string &key, T &field, const std::string &help) {
    app_.add_option("--" + key, field, help)->capture_default_str();
    entries_.push_back({key, [&field] { return fmt::format("{}", field); }});
  }

  std::string echo() const {
    std::string line = "event=config";
    for (const auto &[key, print] : entries_) line += " " + kv(key, print());
    return line;
  }

 private:
  CLI::App &app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> entries_;
};

void register_options(Options &o, RunConfig &c) {
  o.add("input", c.input, "input corpus (.smi or .csv)");
  o.add("output", c.output, "output file; stdout when empty");
  o.add("format", c.format, "corpus format smi|csv; from the extension when empty");
  o.add("checkpoint", c.checkpoint, "model checkpoint (written by train, read otherwise)");
  o.add("save_checkpoint", c.save_checkpoint, "evolve: where to save the fine-tuned model");
  o.add("records", c.records, "generation records CSV (written by evolve, read by report)");
  o.add("opera", c.opera, "report: OPERA predictions CSV");
  o.add("vina_dir", c.vina_dir, "report: directory of Vina logs named <id>.log");
  o.add("plot_dir", c.plot_dir, "report: directory for SVG scatter plots");
  o.add("data_dir", c.data_dir, "property tables; OPFORGE_DATA_DIR or built-in when empty");
  o.add("qed_threshold", c.qed_threshold, "prepare: keep molecules with QED above this");
  o.add("embed_dim", c.embed_dim, "token embedding width");
  o.add("attention_dim", c.attention_dim, "attention projection width");
  o.add("hidden_dim", c.hidden_dim, "LSTM hidden width");
  o.add("window_len", c.window_len, "context window in tokens");
  o.add("epochs", c.epochs, "training epochs");
  o.add("batch_size", c.batch_size, "training mini-batch size");
  o.add("holdout_fraction", c.holdout_fraction, "molecules held out for evaluation");
  o.add("lr", c.lr, "Adam learning rate for training and fine-tuning");
  o.add("seed", c.seed, "seed fragment SMILES");
  o.add("rng_seed", c.rng_seed, "master random seed");
  o.add("n", c.n, "molecules per batch");
  o.add("generation", c.generation, "generate: generation number stamped on records");
  o.add("temperature", c.temperature, "sampling temperature");
  o.add("max_len", c.max_len, "maximum tokens per molecule, seed included");
  o.add("generations", c.generations, "evolve: number of generations");
  o.add("qed_augment_threshold", c.qed_augment_threshold,
        "evolve: QED above which molecules join the fine-tuning set");
  o.add("fine_tune_epochs", c.fine_tune_epochs, "evolve: epochs per fine-tune");
  o.add("fine_tune_batch", c.fine_tune_batch, "evolve: fine-tuning mini-batch size");
  o.add("min_improvement", c.min_improvement, "evolve: early-stop threshold after generation 3");
  o.add("opera_id", c.opera_id, "OPERA column holding the molecule id");
  o.add("opera_logp", c.opera_logp, "OPERA column holding logP");
  o.add("opera_clearance", c.opera_clearance, "OPERA column holding hepatic clearance");
  o.add("opera_caco2", c.opera_caco2, "OPERA column holding Caco-2 permeability");
  o.add("plot_fields", c.plot_fields, "report: comma separated x fields plotted against QED");
  o.add("reference_name", c.reference_name, "report: reference compound name");
  o.add("reference_affinity", c.reference_affinity,
        "report: reference affinity magnitude, kcal/mol");
  o.add("affinity_low", c.affinity_low, "report: low end of the expected range, kcal/mol");
  o.add("affinity_high", c.affinity_high, "report: high end of the expected range, kcal/mol");
  o.add("log_level", c.log_level, "trace|debug|info|warn|error|off");
}

void require(const std::string &value, const char *key, const std::string &command) {
  if (value.empty())
    throw UsageError(fmt::format("{} needs --{}", command, key));
}

// Refuses to write over an input file.
void check_distinct(const std::string &output, std::initializer_list<std::string> inputs) {
  if (output.empty()) return;
  std::error_code ec;
  for (const std::string &in : inputs)
    if (!in.empty() && fs::equivalent(output, in, ec))
      throw UsageError(fmt::format("output {} would overwrite input {}", output, in));
}

// Writes to `path`, or to `out` when the path is empty.
void write_to(const std::string &path, std::ostream &out,
              const std::function<void(std::ostream &)> &writer) {
  if (path.empty()) {
    writer(out);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoFailure, "cannot write " + path);
  writer(file);
  file.flush();
  if (!file) throw Error(ErrorCode::kIoFailure, "write failed: " + path);
}

class Runner {
 public:
  Runner(const RunConfig &config, std::ostream &out, spdlog::logger &log)
      : c_(config), out_(out), log_(log) {}

  void run(const std::string &command) {
    if (command == "prepare") return prepare();
    if (command == "train") return train();
    if (command == "generate") return generate();
    if (command == "evolve") return evolve();
    if (command == "score") return score();
    if (command == "report") return report();
  }

 private:
  const properties::PropertyTables &tables() {
    if (!tables_) {
      const fs::path dir = c_.data_dir.empty() ? properties::PropertyTables::default_data_dir()
                                               : fs::path(c_.data_dir);
      tables_ = std::make_shared<const properties::PropertyTables>(
          properties::PropertyTables::load(dir));
      for (const auto &[file, version] : tables_->versions())
        log_.info("event=data_file dir={} {} {}", quoted(dir.string()), kv("file", file),
                  kv("version", version));
    }
    return *tables_;
  }

  pipeline::LoadedCorpus load_input() {
    const pipeline::LoadedCorpus corpus =
        c_.format.empty() ? pipeline::load_corpus(c_.input)
                          : pipeline::load_corpus(c_.input, pipeline::parse_format(c_.format));
    log_.info("event=corpus {} records={} skipped={}", kv("path", c_.input),
              corpus.records.size(), corpus.skipped);
    return corpus;
  }

  pipeline::Model load_model() {
    pipeline::Model m =
        pipeline::Model::from_checkpoint(neural::load_checkpoint(c_.checkpoint));
    log_.info("event=checkpoint_loaded {} vocab={} embed_dim={} attention_dim={} "
              "hidden_dim={} window_len={}",
              kv("path", c_.checkpoint), m.config.vocab_size, m.config.embed_dim,
              m.config.attention_dim, m.config.hidden_dim, m.config.window_len);
    return m;
  }

  pipeline::GrowOptions grow_options() const {
    pipeline::GrowOptions g;
    g.temperature = c_.temperature;
    g.max_len = c_.max_len;
    return g;
  }

  void log_stats(const pipeline::GenerationStats &s) {
    log_.info("event=generation generation={} count={} validity={:.4f} uniqueness={:.4f} "
              "mean_qed={} mean_qed_valid_unique={}",
              s.generation, s.count, s.validity, s.uniqueness,
              s.mean_qed ? fmt::format("{:.4f}", *s.mean_qed) : "NA",
              s.mean_qed_valid_unique ? fmt::format("{:.4f}", *s.mean_qed_valid_unique) : "NA");
  }

  void prepare() {
    require(c_.input, "input", "prepare");
    require(c_.output, "output", "prepare");
    check_distinct(c_.output, {c_.input});
    const pipeline::LoadedCorpus corpus = load_input();
    const auto kept = pipeline::screen_corpus(corpus.records, tables(), c_.qed_threshold);
    write_to(c_.output, out_, [&](std::ostream &os) {
      for (const pipeline::CorpusRecord &r : kept)
        os << r.smiles << (r.id ? "\t" + *r.id : std::string()) << '\n';
    });
    log_.info("event=prepared kept={} dropped={} {}", kept.size(),
              corpus.records.size() - kept.size(), kv("output", c_.output));
  }

  void train() {
    require(c_.input, "input", "train");
    require(c_.checkpoint, "checkpoint", "train");
    check_distinct(c_.checkpoint, {c_.input});
    const pipeline::LoadedCorpus corpus = load_input();
    neural::ModelConfig config;
    config.embed_dim = c_.embed_dim;
    config.attention_dim = c_.attention_dim;
    config.hidden_dim = c_.hidden_dim;
    config.window_len = c_.window_len;
    config.rng_seed = c_.rng_seed;
    pipeline::TrainOptions options;
    options.epochs = c_.epochs;
    options.batch_size = c_.batch_size;
    options.holdout_fraction = c_.holdout_fraction;
    options.adam.lr = c_.lr;
    options.on_epoch = [&](const pipeline::EpochLog &e) {
      log_.info("event=epoch epoch={} train_loss={:.6f} train_accuracy={:.6f} "
                "holdout_loss={:.6f} holdout_accuracy={:.6f}",
                e.epoch, e.train_loss, e.train_accuracy, e.holdout_loss, e.holdout_accuracy);
    };
    Rng rng(c_.rng_seed);
    const pipeline::TrainResult result = pipeline::train(corpus.records, config, options, rng);
    neural::save_checkpoint(result.model.to_checkpoint(), c_.checkpoint);
    log_.info("event=trained best_epoch={} train_windows={} holdout_windows={} vocab={} {}",
              result.best_epoch, result.train_windows, result.holdout_windows,
              result.model.vocab.size(), kv("checkpoint", c_.checkpoint));
  }

  void generate() {
    require(c_.checkpoint, "checkpoint", "generate");
    check_distinct(c_.output, {c_.checkpoint});
    const pipeline::Model model = load_model();
    pipeline::prepare_seed(c_.seed, model.vocab);
    Rng rng(c_.rng_seed);
    const pipeline::Batch batch = pipeline::generate_batch(c_.seed, model, c_.n, grow_options(),
                                                           rng, tables(), c_.generation);
    log_stats(batch.stats);
    write_to(c_.output, out_,
             [&](std::ostream &os) { pipeline::write_generation_csv(os, batch.records); });
  }

  void evolve() {
    require(c_.checkpoint, "checkpoint", "evolve");
    check_distinct(c_.output, {c_.checkpoint});
    check_distinct(c_.records, {c_.checkpoint});
    check_distinct(c_.save_checkpoint, {c_.checkpoint});
    const pipeline::Model model = load_model();
    pipeline::prepare_seed(c_.seed, model.vocab);
    pipeline::EvolveOptions options;
    options.seed = c_.seed;
    options.generations = c_.generations;
    options.batch_size = c_.n;
    options.grow = grow_options();
    options.qed_augment_threshold = c_.qed_augment_threshold;
    options.fine_tune_epochs = c_.fine_tune_epochs;
    options.fine_tune_batch = c_.fine_tune_batch;
    options.adam.lr = c_.lr;
    options.min_improvement = c_.min_improvement;
    options.on_generation = [&](const pipeline::Batch &b) { log_stats(b.stats); };
    Rng rng(c_.rng_seed);
    const pipeline::EvolveResult result =
        pipeline::run_generations(model, options, rng, tables());
    log_.info("event=evolved generations={} fine_tune_set={}", result.stats.size(),
              result.fine_tune_set);
    write_to(c_.output, out_,
             [&](std::ostream &os) { pipeline::write_stats_csv(os, result.stats); });
    if (!c_.records.empty()) report::emit_csv(result.records, c_.records);
    if (!c_.save_checkpoint.empty())
      neural::save_checkpoint(result.model.to_checkpoint(), c_.save_checkpoint);
  }

  void score() {
    require(c_.input, "input", "score");
    check_distinct(c_.output, {c_.input});
    const pipeline::LoadedCorpus corpus = load_input();
    const properties::PropertyTables &t = tables();
    write_to(c_.output, out_, [&](std::ostream &os) {
      os << "id,smiles,qed,mw,alogp,hba,hbd,psa,rotb,arom,alerts\n";
      for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        const pipeline::CorpusRecord &r = corpus.records[i];
        std::vector<std::string> row = {r.id.value_or(std::to_string(i + 1)), r.smiles};
        std::optional<properties::Scored> s;
        try {
          s = properties::score_smiles(r.smiles, t);
        } catch (const Error &e) {
          log_.warn("event=unscored {} {}", kv("smiles", r.smiles), kv("reason", e.what()));
        }
        if (s) {
          const properties::DescriptorVector &d = s->descriptors;
          row.insert(row.end(),
                     {fmt::format("{:.6f}", s->qed), fmt::format("{:.6f}", d.mw),
                      fmt::format("{:.6f}", d.alogp), std::to_string(d.hba),
                      std::to_string(d.hbd), fmt::format("{:.6f}", d.psa),
                      std::to_string(d.rotb), std::to_string(d.arom), std::to_string(d.alerts)});
        } else {
          row.resize(row.size() + 9);
        }
        csv::write_row(os, row);
      }
    });
  }

  void report() {
    require(c_.records, "records", "report");
    check_distinct(c_.output, {c_.records, c_.opera});
    const std::vector<pipeline::GenerationRecord> records = report::load_generation_csv(c_.records);
    log_.info("event=records {} count={}", kv("path", c_.records), records.size());

    std::vector<report::ExternalPropertyRecord> external;
    if (!c_.opera.empty()) {
      report::OperaTable t = report::parse_opera_csv(
          c_.opera, {c_.opera_id, c_.opera_logp, c_.opera_clearance, c_.opera_caco2});
      log_.info("event=opera {} records={} skipped={}", kv("path", c_.opera), t.records.size(),
                t.skipped);
      external = std::move(t.records);
    }
    std::vector<report::DockingResult> docking;
    if (!c_.vina_dir.empty()) {
      docking = report::load_vina_dir(c_.vina_dir);
      log_.info("event=vina {} logs={}", kv("dir", c_.vina_dir), docking.size());
    }

    report::SummaryOptions options;
    options.range_low = c_.affinity_low;
    options.range_high = c_.affinity_high;
    options.references.clear();
    if (!c_.reference_name.empty())
      options.references.push_back({c_.reference_name, c_.reference_affinity});
    const report::SummaryTable summary = report::summarize(records, external, docking, options);
    if (summary.unjoined)
      log_.warn("event=unjoined records={} note=\"no external record for these ids\"",
                summary.unjoined);
    write_to(c_.output, out_,
             [&](std::ostream &os) { report::write_summary_csv(os, summary); });

    if (!c_.plot_dir.empty()) {
      std::error_code ec;
      fs::create_directories(c_.plot_dir, ec);
      if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + c_.plot_dir);
      std::vector<report::Field> fields;
      for (const auto &name : CLI::detail::split(c_.plot_fields, ','))
        if (!CLI::detail::trim_copy(name).empty())
          fields.push_back(report::parse_field(CLI::detail::trim_copy(name)));
      for (report::Field f : fields) {
        const fs::path path =
            fs::path(c_.plot_dir) / fmt::format("qed_vs_{}.svg", report::field_name(f));
        report::emit_scatter(records, f, report::Field::kQed, path);
        log_.info("event=plot {}", kv("path", path.string()));
      }
    }
  }

  const RunConfig &c_;
  std::ostream &out_;
  spdlog::logger &log_;
  std::shared_ptr<const properties::PropertyTables> tables_;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoFailure: return kExitIo;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidConfig: return kExitUsage;
    default: return kExitData;
  }
}

}  // namespace

int cli_main(std::span<const std::string> args, std::ostream &out, std::ostream &err) {
  CLI::App app{"opforge: fragment-seeded molecule generation", "opforge"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  RunConfig config;
  Options options(app);
  register_options(options, config);

  const std::pair<const char *, const char *> commands[] = {
      {"prepare", "load and screen a corpus into a .smi file"},
      {"train", "train a model and write a checkpoint"},
      {"generate", "grow one batch from the seed and write records CSV"},
      {"evolve", "run the generation loop and write stats CSV"},
      {"score", "descriptors and QED for a corpus, as CSV"},
      {"report", "summary CSV and scatter plots from records, OPERA and Vina files"}};
  for (const auto &[name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
      !app.get_subcommand_no_throw(args[0])) {
    err << "opforge: unknown subcommand '" << args[0] << "'\n\n" << app.help();
    return kExitUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "opforge: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err, true);
  spdlog::logger log("opforge", sink);
  log.set_pattern("%Y-%m-%dT%H:%M:%S.%fZ %l %v", spdlog::pattern_time_type::utc);
  const spdlog::level::level_enum level = spdlog::level::from_str(config.log_level);
  if (level == spdlog::level::off && config.log_level != "off") {
    err << "opforge: unknown log_level '" << config.log_level << "'\n";
    return kExitUsage;
  }
  log.set_level(level);

  try {
    log.info("event=start {} version={}", kv("command", command), OPFORGE_VERSION);
    log.info("{}", options.echo());
    log.info("event=rng master_seed={}", config.rng_seed);
    Runner(config, out, log).run(command);
    log.info("event=done {}", kv("command", command));
    return kExitOk;
  } catch (const UsageError &e) {
    log.error("event=usage {}", kv("message", e.what()));
    err << "opforge: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error &e) {
    log.error("event=failed {} {}", kv("code", std::string(to_string(e.code()))),
              kv("message", e.what()));
    err << "opforge: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error &e) {
    log.error("event=failed {}", kv("message", e.what()));
    err << "opforge: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception &e) {
    log.error("event=failed {}", kv("message", e.what()));
    err << "opforge: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace opforge::cli
