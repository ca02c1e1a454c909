//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "opforge/error.hpp"
#include "opforge/report.hpp"
#include "text.hpp"

namespace opforge::report {
namespace {

namespace fs = std::filesystem;

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::vector<std::string_view> words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// "-----+------------+----------+----------"
bool is_separator(std::string_view line) {
  line = detail::trim(line);
  if (line.find('-') == std::string_view::npos) return false;
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == '-' || c == '+' || c == ' ' || c == '\t'; });
}

[[noreturn]] void malformed(const std::string &id, const std::string &what) {
  throw Error(ErrorCode::kMalformedTable,
              (id.empty() ? std::string("vina log") : "vina log '" + id + "'") + ": " + what);
}

}  // namespace

double DockingResult::best_magnitude() const { return std::fabs(best_affinity()); }

std::vector<double> DockingResult::magnitudes() const {
  std::vector<double> out;
  for (const DockingMode &m : modes) out.push_back(std::fabs(m.affinity));
  return out;
}

DockingResult parse_vina_log(std::string_view text, std::string id) {
  const std::vector<std::string_view> lines = split_lines(text);
  std::size_t k = 0;
  while (k < lines.size() && lines[k].find("mode") == std::string_view::npos) ++k;
  if (k == lines.size()) malformed(id, "no result table header");

  // The column header spans two lines in every Vina release; allow a little
  // slack before the dashes.
  std::size_t sep = k + 1;
  while (sep < lines.size() && sep <= k + 3 && !is_separator(lines[sep])) ++sep;
  if (sep >= lines.size() || !is_separator(lines[sep]))
    malformed(id, "no separator below the table header");

  DockingResult result;
  result.id = std::move(id);
  for (std::size_t i = sep + 1; i < lines.size(); ++i) {
    const std::vector<std::string_view> w = words(lines[i]);
    if (w.empty()) break;
    const std::optional<int> mode = detail::parse_int(w[0]);
    if (!mode) break;  // trailing text such as "Writing output ... done."
    if (w.size() != 4)
      malformed(result.id, fmt::format("row {} has {} fields, expected 4", *mode, w.size()));
    const auto affinity = detail::parse_real(w[1]);
    const auto lb = detail::parse_real(w[2]);
    const auto ub = detail::parse_real(w[3]);
    if (!affinity || !lb || !ub)
      malformed(result.id, fmt::format("row {} has a non-numeric field", *mode));
    if (*mode != static_cast<int>(result.modes.size()) + 1)
      malformed(result.id, fmt::format("mode {} out of sequence", *mode));
    result.modes.push_back({*mode, *affinity, *lb, *ub});
  }
  if (result.modes.empty())
    throw Error(ErrorCode::kNoResultRows,
                "vina log" + (result.id.empty() ? "" : " '" + result.id + "'") +
                    ": table has no rows");
  return result;
}

std::string render_vina_table(const DockingResult &result) {
  std::string out =
      "mode |   affinity | dist from best mode\n"
      "     | (kcal/mol) | rmsd l.b.| rmsd u.b.\n"
      "-----+------------+----------+----------\n";
  for (const DockingMode &m : result.modes)
    out += fmt::format("{:>4} {:>12} {:>10} {:>10}\n", m.mode, fmt::format("{}", m.affinity),
                       fmt::format("{}", m.rmsd_lb), fmt::format("{}", m.rmsd_ub));
  return out;
}

std::vector<DockingResult> load_vina_dir(const fs::path &dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw Error(ErrorCode::kIoFailure, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const fs::directory_entry &e : fs::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".log") files.push_back(e.path());
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot list " + dir.string());
  std::sort(files.begin(), files.end());

  std::vector<DockingResult> out;
  for (const fs::path &file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + file.string());
    std::ostringstream text;
    text << in.rdbuf();
    out.push_back(parse_vina_log(text.str(), file.stem().string()));
  }
  return out;
}

}  // namespace opforge::report
