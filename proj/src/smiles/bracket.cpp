//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include "bracket.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "opforge/error.hpp"

namespace opforge::smiles::internal {
namespace {

constexpr std::array<std::string_view, 66> kElements = {
  "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
  "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti",
  "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
  "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru",
  "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs",
  "Ba", "La", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Pb", "Bi",
};

// Aromatic symbols allowed inside brackets.
constexpr std::array<std::string_view, 9> kAromatic = {
  "b", "c", "n", "o", "p", "s", "se", "as", "te",
};

bool is_aromatic_symbol(std::string_view s) {
  return std::find(kAromatic.begin(), kAromatic.end(), s) != kAromatic.end();
}

[[noreturn]] void fail(std::string_view text, std::size_t offset,
                       std::string_view why) {
  throw Error(ErrorCode::kInvalidBracketAtom,
              std::string(why) + " in '" + std::string(text) + "'", offset);
}

int read_number(std::string_view text, std::size_t &i) {
  int value = 0;
  while (i < text.size()
         && std::isdigit(static_cast<unsigned char>(text[i])) != 0) {
    value = value * 10 + (text[i] - '0');
    ++i;
  }
  return value;
}

}  // namespace

bool is_element_symbol(std::string_view symbol) noexcept {
  return std::find(kElements.begin(), kElements.end(), symbol)
         != kElements.end();
}

Atom parse_bracket_atom(std::string_view text, std::size_t offset) {
  if (text.size() < 3 || text.front() != '[' || text.back() != ']')
    fail(text, offset, "malformed bracket");

  const std::string_view body = text.substr(1, text.size() - 2);
  std::size_t i = 0;
  Atom atom;
  atom.bracket = true;

  // isotope, discarded
  read_number(body, i);

  if (i >= body.size()) fail(text, offset, "missing element");

  // element symbol
  if (std::islower(static_cast<unsigned char>(body[i])) != 0) {
    std::string_view two = body.substr(i, 2);
    std::string_view one = body.substr(i, 1);
    std::string_view sym;
    if (two.size() == 2 && is_aromatic_symbol(two))
      sym = two;
    else if (is_aromatic_symbol(one))
      sym = one;
    else
      fail(text, offset, "unknown aromatic symbol");
    atom.aromatic = true;
    atom.element = std::string(sym);
    atom.element[0] = static_cast<char>(
        std::toupper(static_cast<unsigned char>(atom.element[0])));
    i += sym.size();
  } else if (std::isupper(static_cast<unsigned char>(body[i])) != 0) {
    std::string_view two = body.substr(i, 2);
    if (two.size() == 2 && std::islower(static_cast<unsigned char>(two[1]))
        && is_element_symbol(two)) {
      atom.element = std::string(two);
      i += 2;
    } else if (is_element_symbol(body.substr(i, 1))) {
      atom.element = std::string(body.substr(i, 1));
      i += 1;
    } else {
      fail(text, offset, "unknown element");
    }
  } else {
    fail(text, offset, "missing element");
  }

  // chirality, discarded: @, @@, @TH1, @AL2, @SP3, @TB10, @OH20
  if (i < body.size() && body[i] == '@') {
    ++i;
    if (i < body.size() && body[i] == '@') {
      ++i;
    } else if (i + 1 < body.size()
               && std::isupper(static_cast<unsigned char>(body[i])) != 0
               && std::isupper(static_cast<unsigned char>(body[i + 1])) != 0) {
      i += 2;
      read_number(body, i);
    }
  }

  // hydrogen count
  if (i < body.size() && body[i] == 'H') {
    ++i;
    if (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i])))
      atom.explicit_hydrogens = read_number(body, i);
    else
      atom.explicit_hydrogens = 1;
  }

  // charge: +, ++, +2, -, --, -3
  if (i < body.size() && (body[i] == '+' || body[i] == '-')) {
    const char sign = body[i];
    int magnitude = 1;
    ++i;
    if (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
      magnitude = read_number(body, i);
    } else {
      while (i < body.size() && body[i] == sign) {
        ++magnitude;
        ++i;
      }
    }
    atom.charge = sign == '+' ? magnitude : -magnitude;
  }

  // atom class, discarded
  if (i < body.size() && body[i] == ':') {
    ++i;
    const std::size_t start = i;
    read_number(body, i);
    if (i == start) fail(text, offset, "empty atom class");
  }

  if (i != body.size()) fail(text, offset, "unexpected characters");
  return atom;
}

}  // namespace opforge::smiles::internal
