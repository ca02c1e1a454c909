//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#ifndef OPFORGE_REPORT_HPP_
#define OPFORGE_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opforge/pipeline.hpp"

namespace opforge::report {

// ---------------------------------------------------------------------------
// Docking (AutoDock Vina result tables)
// ---------------------------------------------------------------------------

struct DockingMode {
  int mode;         // 1-based
  double affinity;  // kcal/mol as printed by Vina (negative is favourable)
  double rmsd_lb;   // A
  double rmsd_ub;   // A

  bool operator==(const DockingMode &) const = default;
};

struct DockingResult {
  std::string id;
  std::vector<DockingMode> modes;

  double best_affinity() const { return modes.front().affinity; }
  // Magnitudes as usually quoted ("5.3 kcal/mol" for -5.3).
  double best_magnitude() const;
  std::vector<double> magnitudes() const;
};

/// Reads the result table of a Vina log:
///
///   mode |   affinity | dist from best mode
///        | (kcal/mol) | rmsd l.b.| rmsd u.b.
///   -----+------------+----------+----------
///      1       -5.3          0          0
///
/// Text before the header and after the last row is ignored; leading
/// whitespace is free. Errors: kMalformedTable (no header or separator,
/// a broken row, modes not 1, 2, 3, ...), kNoResultRows.
DockingResult parse_vina_log(std::string_view text, std::string id = {});

/// Vina-style table for a result; parse_vina_log reads it back.
std::string render_vina_table(const DockingResult &result);

/// Every *.log file in `dir`, sorted by name, id = file stem. Throws
/// Error(kIoFailure) plus the parse errors (message names the file).
std::vector<DockingResult> load_vina_dir(const std::filesystem::path &dir);

// ---------------------------------------------------------------------------
// QSAR predictions (OPERA CSV)
// ---------------------------------------------------------------------------

struct ExternalPropertyRecord {
  std::string id;
  double logp;       // log units
  double clearance;  // intrinsic hepatic clearance, uL/min/10^6 cells
  double caco2;      // Caco-2 permeability, log10(cm/s * 1e6)
};

// Our field -> the file's column name.
struct ColumnMap {
  std::string id = "MoleculeID";
  std::string logp = "LogP_pred";
  std::string clearance = "Clint_pred";
  std::string caco2 = "CACO2_pred";
};

struct OperaTable {
  std::vector<ExternalPropertyRecord> records;
  int skipped = 0;  // rows with a missing, blank or non-numeric mapped cell
};

/// Errors: kIoFailure, kMissingMappedColumn (message names the column).
OperaTable parse_opera_csv(const std::filesystem::path &path, const ColumnMap &map = {});
OperaTable parse_opera_csv(std::istream &in, const ColumnMap &map = {});

// ---------------------------------------------------------------------------
// Generation records on disk
// ---------------------------------------------------------------------------

/// Reads a file written by pipeline::write_generation_csv. Ids are rebuilt
/// as gen{g}-{i} with i the row index within generation g, and duplicates
/// are re-flagged per generation. Errors: kIoFailure, kMalformedTable.
std::vector<pipeline::GenerationRecord> load_generation_csv(const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// Summary
// ---------------------------------------------------------------------------

struct Fraction {
  int numerator = 0;
  int denominator = 0;
  std::optional<double> value() const {
    if (denominator == 0) return std::nullopt;
    return static_cast<double>(numerator) / denominator;
  }
};

struct GenerationMean {
  int generation;
  int molecules;  // valid, unique, scored
  std::optional<double> mean_qed;
};

struct AffinityFlag {
  std::string id;
  double magnitude;  // kcal/mol
  bool outside;      // outside [range_low, range_high]
};

struct ReferenceAffinity {
  std::string name;
  double magnitude;
};

struct SummaryOptions {
  double logp_below = 5.0;
  double clearance_below = 300.0;
  double caco2_below = 6.0;
  double range_low = 4.0;   // kcal/mol
  double range_high = 6.0;  // kcal/mol
  std::vector<ReferenceAffinity> references = {{"sarin", 12.0}};
};

struct SummaryTable {
  SummaryOptions options;  // thresholds the fractions and flags used
  std::vector<GenerationMean> mean_qed;
  Fraction logp;       // logP < 5
  Fraction clearance;  // clearance < 300
  Fraction caco2;      // Caco-2 < 6
  std::optional<double> affinity_min;  // magnitude over docking results
  std::optional<double> affinity_max;
  std::vector<AffinityFlag> affinity;  // docking results, then references
  int unjoined = 0;  // valid unique records without an external record
};

/// Joins valid unique generation records with external records on id.
/// Fractions use strict thresholds over the joined set; missing joins
/// shrink the denominators and are counted in `unjoined`.
SummaryTable summarize(std::span<const pipeline::GenerationRecord> records,
                       std::span<const ExternalPropertyRecord> external,
                       std::span<const DockingResult> docking,
                       const SummaryOptions &options = {});

/// metric,generation,id,value,numerator,denominator with values to 4
/// decimals. Affinity rows carry magnitudes in kcal/mol.
void write_summary_csv(std::ostream &out, const SummaryTable &summary);
/// Throws Error(kIoFailure).
void emit_csv(const SummaryTable &summary, const std::filesystem::path &path);
void emit_csv(std::span<const pipeline::GenerationRecord> records,
              const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// Scatter plots
// ---------------------------------------------------------------------------

enum class Field { kMw, kAlogp, kHba, kHbd, kPsa, kRotb, kArom, kAlerts, kQed, kLength };

// "mw", "alogp", ... "qed", "length"; throws Error(kInvalidArgument).
Field parse_field(std::string_view name);
std::string_view field_name(Field field);
// Axis label with unit, e.g. "MW (g/mol)".
std::string_view field_label(Field field);
std::optional<double> field_value(const pipeline::GenerationRecord &record, Field field);

/// Standalone SVG 1.1 scatter of y against x, one circle per record that
/// has both values. Axes span the data extent plus 5% on each side.
/// Deterministic output. Throws Error(kNoPlottableData).
std::string render_scatter(std::span<const pipeline::GenerationRecord> records, Field x,
                           Field y = Field::kQed);
/// Throws Error(kNoPlottableData) or Error(kIoFailure).
void emit_scatter(std::span<const pipeline::GenerationRecord> records, Field x, Field y,
                  const std::filesystem::path &path);

}  // namespace opforge::report

#endif  // OPFORGE_REPORT_HPP_
