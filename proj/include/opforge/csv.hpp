//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#ifndef OPFORGE_CSV_HPP_
#define OPFORGE_CSV_HPP_

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opforge::csv {

/// RFC 4180 record reader: comma separated, fields optionally enclosed in
/// double quotes, "" escapes a quote, quoted fields may span lines. CRLF and
/// LF line ends are both accepted.
class Reader {
 public:
  explicit Reader(std::istream &in) : in_(in) {}

  // Reads the next record into `fields`; false at end of input.
  bool next(std::vector<std::string> &fields);

  // Physical line on which the last record started (1-based).
  int line() const noexcept { return record_line_; }

  // False when the last record had a stray or unterminated quote.
  bool well_formed() const noexcept { return well_formed_; }

 private:
  std::istream &in_;
  int line_ = 0;
  int record_line_ = 0;
  bool well_formed_ = true;
};

// Quotes a field when it holds a comma, quote, CR or LF.
std::string escape(std::string_view field);

// Writes escaped fields joined by commas, terminated by "\n".
void write_row(std::ostream &out, std::span<const std::string> fields);

}  // namespace opforge::csv

#endif  // OPFORGE_CSV_HPP_
