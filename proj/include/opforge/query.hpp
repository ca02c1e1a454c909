//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#ifndef OPFORGE_QUERY_HPP_
#define OPFORGE_QUERY_HPP_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opforge/smiles.hpp"

namespace opforge::properties {

// ---------------------------------------------------------------------------
// Molecule view
// ---------------------------------------------------------------------------

// Per-atom facts the query primitives test. With hydrogens expanded every
// hydrogen is an atom of its own (atomic number 1) and counts toward the
// degree of its heavy neighbour, as in an explicit-H molecule.
struct ViewAtom {
  int atomic_number = 0;
  bool aromatic = false;
  int charge = 0;
  int total_h = 0;       // attached hydrogens, explicit or implicit
  int degree = 0;        // neighbours present in the view
  int total_degree = 0;  // degree plus hydrogens not present as atoms
  int valence = 0;       // bond orders plus hydrogens
  bool in_ring = false;
  int source = -1;       // index in the original graph; -1 for added H
};

struct ViewBond {
  int begin;
  int end;
  smiles::BondOrder order;
  bool in_ring;
};

class MolView {
 public:
  MolView(const smiles::MolecularGraph &graph, bool expand_hydrogens);

  int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  const ViewAtom &atom(int i) const { return atoms_[i]; }
  const ViewBond &bond(int i) const { return bonds_[i]; }
  std::span<const smiles::Neighbor> neighbors(int atom) const {
    return adjacency_[atom];
  }

 private:
  std::vector<ViewAtom> atoms_;
  std::vector<ViewBond> bonds_;
  std::vector<std::vector<smiles::Neighbor>> adjacency_;
};

int atomic_number(std::string_view element);

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

/// Acyclic SMARTS subset used by the descriptor tables. Atom primitives:
/// element symbols (upper case aliphatic, lower case aromatic), #n, *, a, A,
/// Hn, Dn, Xn, vn, R, R0, charges (+, -, +n, -n, +0) and recursive $(...).
/// Bond primitives: - = # : ~ @. Operators ! & , ; with the usual
/// precedence; an omitted bond means single or aromatic. Ring closures and
/// other primitives throw Error(kMalformedDataFile).
class Query {
 public:
  static Query parse(std::string_view smarts);

  const std::string &text() const noexcept { return text_; }
  int atom_count() const noexcept;

  // True when some embedding maps the first query atom onto `atom`.
  bool matches_at(const MolView &mol, int atom) const;

  // Embeddings as target atom lists in query atom order; with `unique`
  // only one embedding per distinct target atom set is kept.
  std::vector<std::vector<int>> matches(const MolView &mol,
                                        bool unique = true) const;

  struct Node;
  struct Pattern;

 private:
  std::string text_;
  std::shared_ptr<const Pattern> pattern_;
};

}  // namespace opforge::properties

#endif  // OPFORGE_QUERY_HPP_
