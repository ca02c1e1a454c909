//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include "opforge/csv.hpp"

namespace opforge::csv {

bool Reader::next(std::vector<std::string> &fields) {
  fields.clear();
  well_formed_ = true;
  std::string line;
  if (!std::getline(in_, line)) return false;
  record_line_ = ++line_;

  std::string field;
  bool quoted = false;       // inside a quoted section
  bool was_quoted = false;   // current field started with a quote
  std::size_t i = 0;
  for (;;) {
    if (i == line.size() || (!quoted && i + 1 == line.size() && line[i] == '\r')) {
      if (!quoted) break;
      // quoted field continues on the next physical line
      std::string more;
      if (!std::getline(in_, more)) {
        well_formed_ = false;
        break;
      }
      ++line_;
      field += '\n';
      line = std::move(more);
      i = 0;
      continue;
    }
    const char c = line[i++];
    if (quoted) {
      if (c != '"') {
        field += c;
      } else if (i < line.size() && line[i] == '"') {
        field += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else {
      if (c == '"' || was_quoted) well_formed_ = false;
      field += c;
    }
  }
  if (field.size() && field.back() == '\r' && !was_quoted) field.pop_back();
  fields.push_back(std::move(field));
  return true;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos)
    return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream &out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace opforge::csv
