//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <string>

#include "bracket.hpp"
#include "opforge/error.hpp"
#include "opforge/smiles.hpp"

namespace opforge::smiles {

int valence_contribution(BondOrder order) noexcept {
  switch (order) {
  case BondOrder::kSingle: return 1;
  case BondOrder::kDouble: return 2;
  case BondOrder::kTriple: return 3;
  case BondOrder::kAromatic: return 1;
  }
  return 1;
}

int MolecularGraph::add_atom(Atom atom) {
  atoms_.push_back(std::move(atom));
  adjacency_.emplace_back();
  return atom_count() - 1;
}

int MolecularGraph::add_bond(int begin, int end, BondOrder order) {
  if (begin < 0 || end < 0 || begin >= atom_count() || end >= atom_count())
    throw Error(ErrorCode::kInvalidArgument, "bond endpoint out of range");
  if (begin == end)
    throw Error(ErrorCode::kInvalidArgument, "self-loop bond", begin);
  if (bond_between(begin, end))
    throw Error(ErrorCode::kInvalidArgument, "duplicate bond", begin);

  const int id = bond_count();
  bonds_.push_back({begin, end, order});
  adjacency_[begin].push_back({end, id});
  adjacency_[end].push_back({begin, id});
  return id;
}

std::optional<int> MolecularGraph::bond_between(int a, int b) const {
  for (const Neighbor &n : adjacency_[a])
    if (n.atom == b) return n.bond;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// parse
// ---------------------------------------------------------------------------

namespace {

struct PendingBond {
  BondOrder order;
  std::size_t position;
};

struct OpenRing {
  int atom;
  std::optional<BondOrder> order;
  std::size_t position;
};

BondOrder bond_from_char(char c) {
  switch (c) {
  case '=': return BondOrder::kDouble;
  case '#': return BondOrder::kTriple;
  case ':': return BondOrder::kAromatic;
  default: return BondOrder::kSingle;  // '-', '/', '\'
  }
}

int ring_number(const std::string &text) {
  return text[0] == '%' ? std::stoi(text.substr(1)) : text[0] - '0';
}

}  // namespace

MolecularGraph parse(std::string_view smiles) {
  if (smiles.empty()) throw Error(ErrorCode::kEmptyInput, "empty SMILES");

  const std::vector<Token> tokens = tokenize(smiles);
  MolecularGraph graph;

  std::optional<int> prev;
  std::optional<PendingBond> pending;
  // (atom before the branch, atom count when the branch opened, offset)
  struct Branch {
    int anchor;
    int atoms_at_open;
    std::size_t position;
  };
  std::vector<Branch> branches;
  std::map<int, OpenRing> rings;

  auto default_order = [&](int a, int b) {
    return graph.atom(a).aromatic && graph.atom(b).aromatic
               ? BondOrder::kAromatic
               : BondOrder::kSingle;
  };

  std::size_t pos = 0;
  for (const Token &tok : tokens) {
    const std::size_t here = pos;
    pos += tok.text.size();

    switch (tok.kind) {
    case TokenKind::kAtom:
    case TokenKind::kAromaticAtom:
    case TokenKind::kBracketAtom: {
      Atom atom;
      if (tok.kind == TokenKind::kBracketAtom) {
        atom = internal::parse_bracket_atom(tok.text, here);
      } else {
        atom.element = *token_element(tok);
        atom.aromatic = tok.kind == TokenKind::kAromaticAtom;
      }
      const int idx = graph.add_atom(std::move(atom));
      if (prev) {
        graph.add_bond(*prev, idx,
                       pending ? pending->order : default_order(*prev, idx));
      } else if (pending) {
        throw Error(ErrorCode::kDanglingBond, "bond without a preceding atom",
                    pending->position);
      }
      pending.reset();
      prev = idx;
      break;
    }
    case TokenKind::kBond: {
      if (tok.text == ".") {
        throw Error(ErrorCode::kSingleFragmentOnly,
                    "dot-separated fragments are not accepted", here);
      }
      if (!prev || pending) {
        throw Error(ErrorCode::kDanglingBond,
                    "bond symbol '" + tok.text + "' has no atom to attach",
                    here);
      }
      pending = PendingBond{bond_from_char(tok.text[0]), here};
      break;
    }
    case TokenKind::kBranchOpen:
      if (!prev)
        throw Error(ErrorCode::kUnmatchedParenthesis, "branch before any atom",
                    here);
      if (pending)
        throw Error(ErrorCode::kDanglingBond, "bond before '('",
                    pending->position);
      branches.push_back({*prev, graph.atom_count(), here});
      break;
    case TokenKind::kBranchClose: {
      if (branches.empty())
        throw Error(ErrorCode::kUnmatchedParenthesis, "unmatched ')'", here);
      if (pending)
        throw Error(ErrorCode::kDanglingBond, "bond before ')'",
                    pending->position);
      const Branch b = branches.back();
      branches.pop_back();
      if (b.atoms_at_open == graph.atom_count())
        throw Error(ErrorCode::kUnmatchedParenthesis, "empty branch",
                    b.position);
      prev = b.anchor;
      break;
    }
    case TokenKind::kRingBond: {
      const int number = ring_number(tok.text);
      if (!prev) {
        throw Error(ErrorCode::kInvalidRingClosure,
                    "ring bond " + tok.text + " before any atom", here);
      }
      auto it = rings.find(number);
      if (it == rings.end()) {
        rings.emplace(number,
                      OpenRing{*prev,
                               pending ? std::optional(pending->order)
                                       : std::nullopt,
                               here});
      } else {
        const OpenRing open = it->second;
        rings.erase(it);
        std::optional<BondOrder> order = open.order;
        if (pending) {
          if (order && *order != pending->order) {
            throw Error(ErrorCode::kInvalidRingClosure,
                        "conflicting bond orders on ring bond " + tok.text,
                        here);
          }
          order = pending->order;
        }
        if (open.atom == *prev || graph.bond_between(open.atom, *prev)) {
          throw Error(ErrorCode::kInvalidRingClosure,
                      "ring bond " + tok.text + " closes onto a bonded atom",
                      here);
        }
        graph.add_bond(open.atom, *prev,
                       order ? *order : default_order(open.atom, *prev));
      }
      pending.reset();
      break;
    }
    case TokenKind::kSpecial:
      throw Error(ErrorCode::kSpecialTokenPresent, "special token in SMILES",
                  here);
    }
  }

  if (pending) {
    throw Error(ErrorCode::kDanglingBond, "trailing bond symbol",
                pending->position);
  }
  if (!branches.empty()) {
    throw Error(ErrorCode::kUnmatchedParenthesis, "unclosed '('",
                branches.back().position);
  }
  if (!rings.empty()) {
    const auto &[number, open] = *rings.begin();
    throw Error(ErrorCode::kUnmatchedRingBond,
                "ring bond " + std::to_string(number) + " is never closed",
                open.position);
  }
  if (graph.atom_count() == 0)
    throw Error(ErrorCode::kEmptyInput, "no atoms");

  const std::vector<bool> in_ring = ring_bonds(graph);
  for (int b = 0; b < graph.bond_count(); ++b)
    if (!in_ring[b] && graph.bond(b).order == BondOrder::kAromatic)
      graph.set_bond_order(b, BondOrder::kSingle);
  return graph;
}

// ---------------------------------------------------------------------------
// valence
// ---------------------------------------------------------------------------

std::vector<int> allowed_valences(std::string_view element, int charge) {
  std::vector<int> base;
  // Shift applied per unit of charge: +1 for pnictogens/chalcogens under a
  // positive charge, and so on. Boron and carbon lose or gain bonds the other
  // way round.
  int shift = 0;
  if (element == "C") {
    base = {4};
    shift = charge == 0 ? 0 : -std::abs(charge);
  } else if (element == "B") {
    base = {3};
    shift = -charge;
  } else if (element == "N") {
    base = {3};
    shift = charge;
  } else if (element == "O") {
    base = {2};
    shift = charge;
  } else if (element == "P") {
    base = {3, 5};
    shift = charge;
  } else if (element == "S") {
    base = {2, 4, 6};
    shift = charge;
  } else if (element == "F" || element == "Cl" || element == "Br"
             || element == "I") {
    base = {1};
    shift = charge;
  } else if (element == "H") {
    base = {1};
    shift = -std::abs(charge);
  } else {
    return {};
  }
  std::vector<int> out;
  for (int v : base)
    if (v + shift >= 0) out.push_back(v + shift);
  return out;
}

int bond_order_sum(const MolecularGraph &graph, int atom) {
  int sum = 0;
  for (const Neighbor &n : graph.neighbors(atom))
    sum += valence_contribution(graph.bond(n.bond).order);
  return sum;
}

namespace {

bool has_double_bond(const MolecularGraph &graph, int atom) {
  for (const Neighbor &n : graph.neighbors(atom))
    if (graph.bond(n.bond).order == BondOrder::kDouble) return true;
  return false;
}

}  // namespace

int implicit_hydrogens(const MolecularGraph &graph, int atom) {
  const Atom &a = graph.atom(atom);
  if (a.bracket) return 0;

  const int sum = bond_order_sum(graph, atom);
  const std::vector<int> allowed = allowed_valences(a.element, a.charge);
  auto target = std::find_if(allowed.begin(), allowed.end(),
                             [sum](int v) { return v >= sum; });
  if (target == allowed.end()) return 0;
  // An aromatic atom spends one valence on the pi system.
  const int h = *target - sum - (a.aromatic ? 1 : 0);
  return std::max(h, 0);
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

ValidityReport validate(const MolecularGraph &graph) {
  ValidityReport report;
  const std::vector<bool> in_ring = ring_atoms(graph);

  for (int i = 0; i < graph.atom_count(); ++i) {
    const Atom &a = graph.atom(i);
    const std::vector<int> allowed = allowed_valences(a.element, a.charge);
    if (allowed.empty()) {
      report.errors.push_back({ValidityCode::kUnsupportedElement, i,
                               "unsupported element " + a.element
                                   + " with charge "
                                   + std::to_string(a.charge)});
      continue;
    }

    int used = bond_order_sum(graph, i) + a.explicit_hydrogens;
    // Neutral aromatic carbon must also carry its pi bond.
    if (a.aromatic && a.element == "C" && a.charge == 0
        && !has_double_bond(graph, i)) {
      ++used;
    }
    if (used > allowed.back()) {
      report.errors.push_back(
          {ValidityCode::kValenceExceeded, i,
           a.element + " uses valence " + std::to_string(used)
               + ", maximum is " + std::to_string(allowed.back())});
    }
    if (a.aromatic && !in_ring[i]) {
      report.errors.push_back({ValidityCode::kAromaticOutsideRing, i,
                               "aromatic " + a.element + " is not in a ring"});
    }
  }
  report.valid = report.errors.empty();
  return report;
}

bool is_valid_smiles(std::string_view smiles) {
  try {
    return validate(parse(smiles)).valid;
  } catch (const Error &) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// rings
// ---------------------------------------------------------------------------

std::vector<bool> ring_bonds(const MolecularGraph &graph) {
  const int n = graph.atom_count();
  std::vector<bool> in_ring(graph.bond_count(), true);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;

  // Iterative bridge finding (Tarjan).
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    std::vector<Frame> stack{{root, -1, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame &f = stack.back();
      auto nbrs = graph.neighbors(f.atom);
      if (f.next < nbrs.size()) {
        const Neighbor nb = nbrs[f.next++];
        if (nb.bond == f.parent_bond) continue;
        if (disc[nb.atom] == -1) {
          disc[nb.atom] = low[nb.atom] = timer++;
          stack.push_back({nb.atom, nb.bond, 0});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[nb.atom]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame &parent = stack.back();
          low[parent.atom] = std::min(low[parent.atom], low[done.atom]);
          if (low[done.atom] > disc[parent.atom])
            in_ring[done.parent_bond] = false;
        }
      }
    }
  }
  return in_ring;
}

std::vector<bool> ring_atoms(const MolecularGraph &graph) {
  std::vector<bool> atoms(graph.atom_count(), false);
  const std::vector<bool> bonds = ring_bonds(graph);
  for (int b = 0; b < graph.bond_count(); ++b) {
    if (!bonds[b]) continue;
    atoms[graph.bond(b).begin] = true;
    atoms[graph.bond(b).end] = true;
  }
  return atoms;
}

int cycle_rank(const MolecularGraph &graph, const std::vector<bool> &keep) {
  const int n = graph.atom_count();
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  int vertices = 0, edges = 0, components = 0;
  for (int i = 0; i < n; ++i) vertices += keep[i] ? 1 : 0;
  components = vertices;
  for (const Bond &b : graph.bonds()) {
    if (!keep[b.begin] || !keep[b.end]) continue;
    ++edges;
    const int ra = find(b.begin), rb = find(b.end);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return edges - vertices + components;
}

}  // namespace opforge::smiles
