//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "opforge/cli.hpp"
#include "opforge/error.hpp"
#include "opforge/pipeline.hpp"
#include "opforge/report.hpp"

namespace py = pybind11;
using namespace opforge;

namespace {

const properties::PropertyTables &tables() { return *properties::PropertyTables::shared(); }

std::vector<std::string> tokenize_texts(const std::string &s) {
  std::vector<std::string> out;
  for (const smiles::Token &t : smiles::tokenize(s)) out.push_back(t.text);
  return out;
}

std::string detokenize_texts(const std::vector<std::string> &texts) {
  std::vector<smiles::Token> tokens;
  for (const std::string &t : texts) tokens.push_back(smiles::make_token(t));
  return smiles::detokenize(tokens);
}

py::dict descriptor_dict(const properties::DescriptorVector &d) {
  py::dict out;
  out["mw"] = d.mw;
  out["alogp"] = d.alogp;
  out["hba"] = d.hba;
  out["hbd"] = d.hbd;
  out["psa"] = d.psa;
  out["rotb"] = d.rotb;
  out["arom"] = d.arom;
  out["alerts"] = d.alerts;
  return out;
}

py::object score(const std::string &s, bool zero_alerts) {
  const auto scored = properties::score_smiles(s, tables(), {.zero_alerts = zero_alerts});
  if (!scored) return py::none();
  py::dict out = descriptor_dict(scored->descriptors);
  out["qed"] = scored->qed;
  return std::move(out);
}

pipeline::Model train(const std::vector<std::string> &smiles, int epochs, int batch_size,
                      double holdout_fraction, double lr, int embed_dim, int attention_dim,
                      int hidden_dim, int window_len, std::uint64_t rng_seed) {
  std::vector<pipeline::CorpusRecord> records;
  for (const std::string &s : smiles) records.push_back({s, std::nullopt, std::nullopt});
  neural::ModelConfig config;
  config.embed_dim = embed_dim;
  config.attention_dim = attention_dim;
  config.hidden_dim = hidden_dim;
  config.window_len = window_len;
  config.rng_seed = rng_seed;
  pipeline::TrainOptions options;
  options.epochs = epochs;
  options.batch_size = batch_size;
  options.holdout_fraction = holdout_fraction;
  options.adam.lr = lr;
  pipeline::Rng rng(rng_seed);
  py::gil_scoped_release release;
  return pipeline::train(records, config, options, rng).model;
}

std::vector<pipeline::GenerationRecord> generate(const pipeline::Model &model,
                                                 const std::string &seed, int n,
                                                 double temperature, int max_len,
                                                 std::uint64_t rng_seed, int generation) {
  pipeline::Rng rng(rng_seed);
  py::gil_scoped_release release;
  return pipeline::generate_batch(seed, model, n, {temperature, max_len, {}}, rng, tables(),
                                  generation)
      .records;
}

std::vector<pipeline::GenerationStats> evolve(const pipeline::Model &model,
                                              const std::string &seed, int generations, int n,
                                              double temperature, int max_len,
                                              double qed_augment_threshold, int fine_tune_epochs,
                                              int fine_tune_batch, double lr,
                                              std::uint64_t rng_seed) {
  pipeline::EvolveOptions o;
  o.seed = seed;
  o.generations = generations;
  o.batch_size = n;
  o.grow = {temperature, max_len, {}};
  o.qed_augment_threshold = qed_augment_threshold;
  o.fine_tune_epochs = fine_tune_epochs;
  o.fine_tune_batch = fine_tune_batch;
  o.adam.lr = lr;
  pipeline::Rng rng(rng_seed);
  py::gil_scoped_release release;
  return pipeline::run_generations(model, o, rng, tables()).stats;
}

py::tuple run_cli(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  const int code = cli::cli_main(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "opforge native core";

  // Held by the module for the life of the process.
  static PyObject *error_type =
      PyErr_NewException("opforge._core.OpforgeError", PyExc_RuntimeError, nullptr);
  m.attr("OpforgeError") = py::reinterpret_borrow<py::object>(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error &e) {
      py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, instance.ptr());
    }
  });

  m.def("tokenize", &tokenize_texts, py::arg("smiles"));
  m.def("detokenize", &detokenize_texts, py::arg("tokens"));
  m.def("is_valid_smiles", [](const std::string &s) { return smiles::is_valid_smiles(s); },
        py::arg("smiles"));
  m.def("score", &score, py::arg("smiles"), py::arg("zero_alerts") = false,
        "Descriptors and QED as a dict, or None when the SMILES does not validate.");

  py::class_<pipeline::GenerationRecord>(m, "GenerationRecord")
      .def_readonly("id", &pipeline::GenerationRecord::id)
      .def_readonly("smiles", &pipeline::GenerationRecord::smiles)
      .def_readonly("valid", &pipeline::GenerationRecord::valid)
      .def_readonly("contains_fragment", &pipeline::GenerationRecord::contains_fragment)
      .def_readonly("duplicate", &pipeline::GenerationRecord::duplicate)
      .def_readonly("generation", &pipeline::GenerationRecord::generation)
      .def_readonly("length", &pipeline::GenerationRecord::length)
      .def_readonly("qed", &pipeline::GenerationRecord::qed)
      .def_property_readonly("descriptors", [](const pipeline::GenerationRecord &r) -> py::object {
        if (!r.descriptors) return py::none();
        return descriptor_dict(*r.descriptors);
      });

  py::class_<pipeline::GenerationStats>(m, "GenerationStats")
      .def_readonly("generation", &pipeline::GenerationStats::generation)
      .def_readonly("count", &pipeline::GenerationStats::count)
      .def_readonly("validity", &pipeline::GenerationStats::validity)
      .def_readonly("uniqueness", &pipeline::GenerationStats::uniqueness)
      .def_readonly("mean_qed", &pipeline::GenerationStats::mean_qed)
      .def_readonly("mean_qed_valid_unique", &pipeline::GenerationStats::mean_qed_valid_unique);

  py::class_<pipeline::Model>(m, "Model")
      .def_static(
          "load",
          [](const std::filesystem::path &path) {
            return pipeline::Model::from_checkpoint(neural::load_checkpoint(path));
          },
          py::arg("path"))
      .def("save",
           [](const pipeline::Model &model, const std::filesystem::path &path) {
             neural::save_checkpoint(model.to_checkpoint(), path);
           },
           py::arg("path"))
      .def_property_readonly("vocab_size", [](const pipeline::Model &m) { return m.vocab.size(); })
      .def_property_readonly("tokens", [](const pipeline::Model &m) { return m.vocab.texts(); })
      .def("generate", &generate, py::arg("seed") = std::string(pipeline::kDefaultSeed),
           py::arg("n") = 1200, py::arg("temperature") = 1.0, py::arg("max_len") = 100,
           py::arg("rng_seed") = 7, py::arg("generation") = 1)
      .def("evolve", &evolve, py::arg("seed") = std::string(pipeline::kDefaultSeed),
           py::arg("generations") = 3, py::arg("n") = 1200, py::arg("temperature") = 1.0,
           py::arg("max_len") = 100, py::arg("qed_augment_threshold") = 0.5,
           py::arg("fine_tune_epochs") = 2, py::arg("fine_tune_batch") = 32, py::arg("lr") = 3e-3,
           py::arg("rng_seed") = 7);

  m.def("train", &train, py::arg("smiles"), py::arg("epochs") = 5, py::arg("batch_size") = 64,
        py::arg("holdout_fraction") = 0.05, py::arg("lr") = 3e-3, py::arg("embed_dim") = 32,
        py::arg("attention_dim") = 16, py::arg("hidden_dim") = 64, py::arg("window_len") = 24,
        py::arg("rng_seed") = 7);

  m.def(
      "parse_vina_log",
      [](const std::string &text) {
        std::vector<std::tuple<int, double, double, double>> out;
        for (const report::DockingMode &d : report::parse_vina_log(text).modes)
          out.emplace_back(d.mode, d.affinity, d.rmsd_lb, d.rmsd_ub);
        return out;
      },
      py::arg("text"), "(mode, affinity kcal/mol, rmsd_lb, rmsd_ub) per table row.");

  m.def(
      "scatter_svg",
      [](const std::vector<pipeline::GenerationRecord> &records, const std::string &x,
         const std::string &y) {
        return report::render_scatter(records, report::parse_field(x), report::parse_field(y));
      },
      py::arg("records"), py::arg("x"), py::arg("y") = "qed");

  m.def("run", &run_cli, py::arg("args"),
        "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}
