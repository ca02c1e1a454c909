//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "opforge/csv.hpp"
#include "opforge/error.hpp"
#include "opforge/report.hpp"

namespace opforge::report {
namespace {

namespace fs = std::filesystem;

std::string fixed4(double v) { return fmt::format("{:.4f}", v); }

void count(Fraction &f, bool hit) {
  ++f.denominator;
  f.numerator += hit ? 1 : 0;
}

std::ofstream open_for_write(const fs::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream &out, const fs::path &path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

}  // namespace

SummaryTable summarize(std::span<const pipeline::GenerationRecord> records,
                       std::span<const ExternalPropertyRecord> external,
                       std::span<const DockingResult> docking,
                       const SummaryOptions &options) {
  SummaryTable table;
  table.options = options;

  std::map<int, std::pair<int, double>> per_generation;
  for (const pipeline::GenerationRecord &r : records) {
    auto &[n, sum] = per_generation[r.generation];
    if (r.valid && !r.duplicate && r.qed) {
      ++n;
      sum += *r.qed;
    }
  }
  for (const auto &[g, acc] : per_generation) {
    GenerationMean m{g, acc.first, std::nullopt};
    if (acc.first) m.mean_qed = acc.second / acc.first;
    table.mean_qed.push_back(m);
  }

  std::unordered_map<std::string, const ExternalPropertyRecord *> by_id;
  for (const ExternalPropertyRecord &e : external) by_id.emplace(e.id, &e);
  for (const pipeline::GenerationRecord &r : records) {
    if (!r.valid || r.duplicate) continue;
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) {
      ++table.unjoined;
      continue;
    }
    const ExternalPropertyRecord &e = *it->second;
    count(table.logp, e.logp < options.logp_below);
    count(table.clearance, e.clearance < options.clearance_below);
    count(table.caco2, e.caco2 < options.caco2_below);
  }

  auto flag = [&](const std::string &id, double magnitude) {
    table.affinity.push_back(
        {id, magnitude, magnitude < options.range_low || magnitude > options.range_high});
  };
  for (const DockingResult &d : docking) {
    if (d.modes.empty()) continue;
    const double m = d.best_magnitude();
    table.affinity_min = std::min(table.affinity_min.value_or(m), m);
    table.affinity_max = std::max(table.affinity_max.value_or(m), m);
    flag(d.id, m);
  }
  for (const ReferenceAffinity &ref : options.references) flag(ref.name, ref.magnitude);
  return table;
}

void write_summary_csv(std::ostream &out, const SummaryTable &s) {
  const SummaryOptions &o = s.options;
  out << "metric,generation,id,value,numerator,denominator\n";
  auto row = [&](std::string metric, std::string generation, std::string id, std::string value,
                 std::string numerator, std::string denominator) {
    const std::string fields[] = {std::move(metric),    std::move(generation),
                                  std::move(id),        std::move(value),
                                  std::move(numerator), std::move(denominator)};
    csv::write_row(out, fields);
  };
  for (const GenerationMean &m : s.mean_qed)
    row("mean_qed_valid_unique", std::to_string(m.generation), "",
        m.mean_qed ? fixed4(*m.mean_qed) : "", "", std::to_string(m.molecules));

  auto fraction = [&](const std::string &metric, const Fraction &f) {
    const auto v = f.value();
    row(metric, "", "", v ? fixed4(*v) : "", std::to_string(f.numerator),
        std::to_string(f.denominator));
  };
  fraction(fmt::format("fraction_logp_lt_{}", o.logp_below), s.logp);
  fraction(fmt::format("fraction_clearance_lt_{}", o.clearance_below), s.clearance);
  fraction(fmt::format("fraction_caco2_lt_{}", o.caco2_below), s.caco2);
  row("unjoined_records", "", "", "", "", std::to_string(s.unjoined));

  if (s.affinity_min) {
    row("affinity_magnitude_min_kcal_per_mol", "", "", fixed4(*s.affinity_min), "", "");
    row("affinity_magnitude_max_kcal_per_mol", "", "", fixed4(*s.affinity_max), "", "");
  }
  const std::string outside =
      fmt::format("affinity_outside_{}_{}_kcal_per_mol", o.range_low, o.range_high);
  for (const AffinityFlag &f : s.affinity) {
    row("affinity_magnitude_kcal_per_mol", "", f.id, fixed4(f.magnitude), "", "");
    if (f.outside) row(outside, "", f.id, fixed4(f.magnitude), "", "");
  }
}

void emit_csv(const SummaryTable &summary, const fs::path &path) {
  std::ofstream out = open_for_write(path);
  write_summary_csv(out, summary);
  finish(out, path);
}

void emit_csv(std::span<const pipeline::GenerationRecord> records, const fs::path &path) {
  std::ofstream out = open_for_write(path);
  pipeline::write_generation_csv(out, records);
  finish(out, path);
}

}  // namespace opforge::report
