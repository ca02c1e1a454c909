//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <fstream>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>

#include "opforge/csv.hpp"
#include "opforge/error.hpp"
#include "opforge/report.hpp"
#include "text.hpp"

namespace opforge::report {
namespace {

namespace fs = std::filesystem;

bool blank_row(const std::vector<std::string> &fields) {
  return fields.size() == 1 && detail::trim(fields[0]).empty();
}

int column_of(const std::vector<std::string> &header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (detail::trim(header[i]) == detail::trim(name)) return static_cast<int>(i);
  return -1;
}

std::string_view cell(const std::vector<std::string> &fields, int col) {
  return col < static_cast<int>(fields.size()) ? detail::trim(fields[col]) : std::string_view();
}

}  // namespace

OperaTable parse_opera_csv(std::istream &in, const ColumnMap &map) {
  csv::Reader reader(in);
  std::vector<std::string> header;
  reader.next(header);
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  const std::pair<const char *, const std::string *> wanted[] = {
      {"id", &map.id}, {"logp", &map.logp}, {"clearance", &map.clearance}, {"caco2", &map.caco2}};
  int cols[4];
  for (int k = 0; k < 4; ++k) {
    cols[k] = column_of(header, *wanted[k].second);
    if (cols[k] < 0)
      throw Error(ErrorCode::kMissingMappedColumn,
                  fmt::format("column '{}' (mapped from {}) is not in the header",
                              *wanted[k].second, wanted[k].first));
  }

  OperaTable table;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (blank_row(fields)) continue;
    const std::string_view id = cell(fields, cols[0]);
    const auto logp = detail::parse_real(cell(fields, cols[1]));
    const auto clearance = detail::parse_real(cell(fields, cols[2]));
    const auto caco2 = detail::parse_real(cell(fields, cols[3]));
    if (!reader.well_formed() || id.empty() || !logp || !clearance || !caco2) {
      ++table.skipped;
      continue;
    }
    table.records.push_back({std::string(id), *logp, *clearance, *caco2});
  }
  return table;
}

OperaTable parse_opera_csv(const fs::path &path, const ColumnMap &map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  return parse_opera_csv(in, map);
}

std::vector<pipeline::GenerationRecord> load_generation_csv(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  csv::Reader reader(in);
  std::vector<std::string> header;
  reader.next(header);

  static constexpr const char *kColumns[] = {
      "generation", "smiles", "valid", "contains_fragment", "length", "qed", "mw",
      "alogp",      "hba",    "hbd",   "psa",               "rotb",   "arom", "alerts"};
  int cols[14];
  for (int k = 0; k < 14; ++k) {
    cols[k] = column_of(header, kColumns[k]);
    if (cols[k] < 0)
      throw Error(ErrorCode::kMalformedTable,
                  fmt::format("{}: missing column '{}'", path.string(), kColumns[k]));
  }

  auto bad_row = [&](int line) -> Error {
    return Error(ErrorCode::kMalformedTable, fmt::format("{}:{}: bad record", path.string(), line));
  };
  auto flag = [&](std::string_view s, int line) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw bad_row(line);
  };

  std::vector<pipeline::GenerationRecord> out;
  std::map<int, int> next_index;
  std::map<int, std::unordered_set<std::string>> seen;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (blank_row(f)) continue;
    const int line = reader.line();
    if (!reader.well_formed()) throw bad_row(line);
    pipeline::GenerationRecord r;
    const auto generation = detail::parse_int(cell(f, cols[0]));
    const auto length = detail::parse_int(cell(f, cols[4]));
    if (!generation || !length) throw bad_row(line);
    r.generation = *generation;
    r.length = *length;
    r.smiles = std::string(cell(f, cols[1]));
    r.valid = flag(cell(f, cols[2]), line);
    r.contains_fragment = flag(cell(f, cols[3]), line);
    if (!cell(f, cols[5]).empty()) {
      r.qed = detail::parse_real(cell(f, cols[5]));
      if (!r.qed) throw bad_row(line);
    }
    bool any = false, all = true;
    for (int k = 6; k < 14; ++k) {
      if (cell(f, cols[k]).empty())
        all = false;
      else
        any = true;
    }
    if (any && !all) throw bad_row(line);
    if (all) {
      properties::DescriptorVector d;
      const auto mw = detail::parse_real(cell(f, cols[6]));
      const auto alogp = detail::parse_real(cell(f, cols[7]));
      const auto psa = detail::parse_real(cell(f, cols[10]));
      const auto hba = detail::parse_int(cell(f, cols[8]));
      const auto hbd = detail::parse_int(cell(f, cols[9]));
      const auto rotb = detail::parse_int(cell(f, cols[11]));
      const auto arom = detail::parse_int(cell(f, cols[12]));
      const auto alerts = detail::parse_int(cell(f, cols[13]));
      if (!mw || !alogp || !psa || !hba || !hbd || !rotb || !arom || !alerts) throw bad_row(line);
      d.mw = *mw;
      d.alogp = *alogp;
      d.hba = *hba;
      d.hbd = *hbd;
      d.psa = *psa;
      d.rotb = *rotb;
      d.arom = *arom;
      d.alerts = *alerts;
      r.descriptors = d;
    }
    r.id = fmt::format("gen{}-{}", r.generation, next_index[r.generation]++);
    r.duplicate = !seen[r.generation].insert(r.smiles).second;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace opforge::report
