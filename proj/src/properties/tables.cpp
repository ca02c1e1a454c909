//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "opforge/error.hpp"
#include "opforge/properties.hpp"

#ifndef OPFORGE_DEFAULT_DATA_DIR
#define OPFORGE_DEFAULT_DATA_DIR "data"
#endif

namespace opforge::properties {
namespace {

struct Table {
  std::string version;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
};

[[noreturn]] void malformed(const std::filesystem::path &path, int line,
                            const std::string &what) {
  throw Error(ErrorCode::kMalformedDataFile,
              path.filename().string() + ":" + std::to_string(line) + ": "
                  + what);
}

Table read_table(const std::filesystem::path &path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  Table t;
  std::string line;
  int number = 0;
  if (!std::getline(in, line) || line.rfind("#version\t", 0) != 0)
    malformed(path, 1, "first line must be '#version<TAB>...'");
  ++number;
  t.version = line.substr(9);
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < columns)
      malformed(path, number,
                "expected " + std::to_string(columns) + " columns, found "
                    + std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(number);
  }
  return t;
}

double to_double(const std::filesystem::path &path, int line,
                 const std::string &s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    malformed(path, line, "bad number '" + s + "'");
  return v;
}

std::optional<int> to_key(const std::filesystem::path &path, int line,
                          const std::string &s) {
  if (s == "*") return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    malformed(path, line, "bad integer '" + s + "'");
  return v;
}

Query to_query(const std::filesystem::path &path, int line,
               const std::string &s) {
  try {
    return Query::parse(s);
  } catch (const Error &e) {
    malformed(path, line, e.what());
  }
}

}  // namespace

void DesirabilityParams::validate() const {
  if (e == 0.0 || f == 0.0)
    throw Error(ErrorCode::kInvalidArgument, "desirability e and f must be non-zero");
  if (!(dmax > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "desirability maximum must be positive");
}

PropertyTables PropertyTables::load(const std::filesystem::path &dir) {
  PropertyTables t;

  {
    const auto path = dir / "atomic_weights.tsv";
    const Table tab = read_table(path, 2);
    for (std::size_t i = 0; i < tab.rows.size(); ++i)
      t.weights_[tab.rows[i][0]] =
          to_double(path, tab.line_numbers[i], tab.rows[i][1]);
    t.versions_["atomic_weights.tsv"] = tab.version;
    for (std::string_view e : {"H", "B", "C", "N", "O", "F", "P", "S", "Cl",
                               "Br", "I"}) {
      if (!t.weights_.count(e))
        malformed(path, 0, "missing weight for parser element " + std::string(e));
    }
  }
  {
    const auto path = dir / "crippen.tsv";
    const Table tab = read_table(path, 3);
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
      const auto &r = tab.rows[i];
      const int ln = tab.line_numbers[i];
      t.crippen_.push_back({r[0], to_query(path, ln, r[1]), to_double(path, ln, r[2])});
    }
    t.versions_["crippen.tsv"] = tab.version;
  }
  {
    const auto path = dir / "tpsa.tsv";
    const Table tab = read_table(path, 5);
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
      const auto &r = tab.rows[i];
      const int ln = tab.line_numbers[i];
      if (r[0] == "fallback") {
        t.tpsa_fallback_[r[1]] = {to_double(path, ln, r[2]),
                                  to_double(path, ln, r[3]),
                                  to_double(path, ln, r[4])};
        continue;
      }
      if (r.size() < 10) malformed(path, ln, "expected 10 columns");
      TpsaRow row;
      row.element = r[0];
      for (std::size_t k = 0; k < row.key.size(); ++k)
        row.key[k] = to_key(path, ln, r[k + 1]);
      row.psa = to_double(path, ln, r[9]);
      t.tpsa_.push_back(std::move(row));
    }
    t.versions_["tpsa.tsv"] = tab.version;
  }
  {
    const auto path = dir / "acceptors.tsv";
    const Table tab = read_table(path, 2);
    for (std::size_t i = 0; i < tab.rows.size(); ++i)
      t.acceptors_.push_back(to_query(path, tab.line_numbers[i], tab.rows[i][1]));
    t.versions_["acceptors.tsv"] = tab.version;
  }
  {
    const auto path = dir / "alerts.tsv";
    const Table tab = read_table(path, 2);
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
      const auto &r = tab.rows[i];
      try {
        t.alerts_.push_back({r[0], r[1], smiles::parse(r[1])});
      } catch (const Error &e) {
        malformed(path, tab.line_numbers[i], e.what());
      }
      if (t.alerts_.back().graph.atom_count() > smiles::kMaxPatternAtoms)
        malformed(path, tab.line_numbers[i], "alert pattern too large");
    }
    t.versions_["alerts.tsv"] = tab.version;
  }
  {
    const auto path = dir / "qed_params.tsv";
    const Table tab = read_table(path, 8);
    std::array<bool, kDescriptorCount> seen{};
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
      const auto &r = tab.rows[i];
      const int ln = tab.line_numbers[i];
      std::size_t slot = kDescriptorCount;
      for (std::size_t k = 0; k < kDescriptorCount; ++k)
        if (kDescriptorNames[k] == r[0]) slot = k;
      if (slot == kDescriptorCount) malformed(path, ln, "unknown descriptor " + r[0]);
      DesirabilityParams p{to_double(path, ln, r[1]), to_double(path, ln, r[2]),
                           to_double(path, ln, r[3]), to_double(path, ln, r[4]),
                           to_double(path, ln, r[5]), to_double(path, ln, r[6]),
                           to_double(path, ln, r[7])};
      try {
        p.validate();
      } catch (const Error &e) {
        malformed(path, ln, e.what());
      }
      t.desirability_[slot] = p;
      seen[slot] = true;
    }
    for (std::size_t k = 0; k < kDescriptorCount; ++k)
      if (!seen[k])
        malformed(path, 0, "no row for " + std::string(kDescriptorNames[k]));
    t.versions_["qed_params.tsv"] = tab.version;
  }
  return t;
}

std::filesystem::path PropertyTables::default_data_dir() {
  if (const char *env = std::getenv("OPFORGE_DATA_DIR"); env && *env)
    return env;
  return OPFORGE_DEFAULT_DATA_DIR;
}

std::shared_ptr<const PropertyTables> PropertyTables::shared() {
  static std::mutex mu;
  static std::shared_ptr<const PropertyTables> tables;
  std::lock_guard lock(mu);
  if (!tables)
    tables = std::make_shared<const PropertyTables>(load(default_data_dir()));
  return tables;
}

double PropertyTables::atomic_weight(std::string_view element) const {
  auto it = weights_.find(element);
  if (it == weights_.end())
    throw Error(ErrorCode::kUnknownElementWeight,
                "no atomic weight for " + std::string(element));
  return it->second;
}

}  // namespace opforge::properties
