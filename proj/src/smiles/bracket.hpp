//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#ifndef OPFORGE_SRC_SMILES_BRACKET_HPP_
#define OPFORGE_SRC_SMILES_BRACKET_HPP_

#include <cstddef>
#include <string_view>

#include "opforge/smiles.hpp"

namespace opforge::smiles::internal {

bool is_element_symbol(std::string_view symbol) noexcept;

// Parses "[...]" into an atom. `offset` is the position of '[' in the
// enclosing string and is used for error reporting only.
Atom parse_bracket_atom(std::string_view text, std::size_t offset);

}  // namespace opforge::smiles::internal

#endif  // OPFORGE_SRC_SMILES_BRACKET_HPP_
