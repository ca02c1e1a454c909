//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "opforge/error.hpp"
#include "opforge/query.hpp"

namespace opforge::properties {

using smiles::BondOrder;
using smiles::MolecularGraph;

namespace {

struct ElementInfo {
  std::string_view symbol;
  int number;
};

constexpr ElementInfo kElements[] = {
    {"H", 1},   {"Li", 3},  {"Be", 4},  {"B", 5},   {"C", 6},   {"N", 7},
    {"O", 8},   {"F", 9},   {"Na", 11}, {"Mg", 12}, {"Al", 13}, {"Si", 14},
    {"P", 15},  {"S", 16},  {"Cl", 17}, {"K", 19},  {"Ca", 20}, {"Fe", 26},
    {"Cu", 29}, {"Zn", 30}, {"Ge", 32}, {"As", 33}, {"Se", 34}, {"Br", 35},
    {"Sn", 50}, {"Sb", 51}, {"Te", 52}, {"I", 53},
};

// Valence an aromatic atom reaches once its pi bond is counted: the smallest
// allowed valence at or above its sigma bonds plus hydrogens.
int aromatic_valence(const smiles::Atom &a, int sigma) {
  for (int v : smiles::allowed_valences(a.element, a.charge))
    if (v >= sigma) return v;
  return sigma;
}

}  // namespace

int atomic_number(std::string_view element) {
  for (const auto &e : kElements)
    if (e.symbol == element) return e.number;
  return 0;
}

MolView::MolView(const MolecularGraph &graph, bool expand_hydrogens) {
  const std::vector<bool> ring_bond = smiles::ring_bonds(graph);
  const int n = graph.atom_count();
  atoms_.resize(n);
  adjacency_.resize(n);
  for (int i = 0; i < n; ++i) {
    const smiles::Atom &a = graph.atom(i);
    ViewAtom &v = atoms_[i];
    v.atomic_number = atomic_number(a.element);
    v.aromatic = a.aromatic;
    v.charge = a.charge;
    v.total_h = smiles::total_hydrogens(graph, i);
    v.source = i;
    int order_sum = 0;
    for (const smiles::Neighbor &nb : graph.neighbors(i)) {
      order_sum += smiles::valence_contribution(graph.bond(nb.bond).order);
      v.in_ring = v.in_ring || ring_bond[nb.bond];
    }
    v.valence = a.aromatic ? aromatic_valence(a, order_sum + v.total_h)
                           : order_sum + v.total_h;
  }
  for (int b = 0; b < graph.bond_count(); ++b) {
    const smiles::Bond &bd = graph.bond(b);
    bonds_.push_back({bd.begin, bd.end, bd.order, ring_bond[b]});
    adjacency_[bd.begin].push_back({bd.end, b});
    adjacency_[bd.end].push_back({bd.begin, b});
  }
  if (expand_hydrogens) {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < atoms_[i].total_h; ++k) {
        ViewAtom h;
        h.atomic_number = 1;
        h.degree = h.total_degree = h.valence = 1;
        const int hi = atom_count();
        const int b = static_cast<int>(bonds_.size());
        atoms_.push_back(h);
        adjacency_.emplace_back();
        bonds_.push_back({i, hi, BondOrder::kSingle, false});
        adjacency_[i].push_back({hi, b});
        adjacency_[hi].push_back({i, b});
      }
    }
  }
  for (int i = 0; i < atom_count(); ++i) {
    ViewAtom &v = atoms_[i];
    v.degree = static_cast<int>(adjacency_[i].size());
    int h_atoms = 0;
    for (const smiles::Neighbor &nb : adjacency_[i])
      h_atoms += atoms_[nb.atom].atomic_number == 1 ? 1 : 0;
    v.total_degree = v.degree + v.total_h - h_atoms;
  }
}

// ---------------------------------------------------------------------------
// expression trees
// ---------------------------------------------------------------------------

struct Query::Node {
  enum class Kind {
    kTrue,
    kElement,    // value = atomic number, flag = -1 any, 0 aliphatic, 1 aromatic
    kAromatic,   // value = 1 aromatic, 0 aliphatic
    kHCount,
    kDegree,
    kTotalDegree,
    kValence,
    kRing,       // value = 1 in ring, 0 not
    kCharge,
    kRecursive,
    kBondOrder,  // value = BondOrder
    kBondDefault,
    kBondRing,
    kNot,
    kAnd,
    kOr,
  };
  Kind kind = Kind::kTrue;
  int value = 0;
  int flag = -1;
  std::shared_ptr<const Pattern> sub;
  std::vector<Node> children;
};

struct Query::Pattern {
  std::vector<Node> atoms;
  std::vector<int> parent;       // -1 for the first atom
  std::vector<Node> parent_bond;
};

namespace {

using Node = Query::Node;
using Kind = Query::Node::Kind;

[[noreturn]] void fail(std::string_view text, std::size_t pos,
                       const std::string &what) {
  throw Error(ErrorCode::kMalformedDataFile,
              "query '" + std::string(text) + "': " + what + " at offset "
                  + std::to_string(pos),
              pos);
}

Node combine(Kind kind, std::vector<Node> children) {
  if (children.size() == 1) return std::move(children.front());
  Node n;
  n.kind = kind;
  n.children = std::move(children);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::shared_ptr<const Query::Pattern> pattern() {
    auto p = std::make_shared<Query::Pattern>();
    std::vector<int> branches;
    int prev = -1;
    std::optional<Node> bond;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        if (prev < 0 || bond) fail(text_, pos_, "misplaced '('");
        branches.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (branches.empty() || bond) fail(text_, pos_, "misplaced ')'");
        prev = branches.back();
        branches.pop_back();
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        fail(text_, pos_, "ring closures are not supported");
      } else if (is_bond_start(c)) {
        if (prev < 0 || bond) fail(text_, pos_, "misplaced bond");
        bond = bond_expr();
      } else {
        Node atom = c == '[' ? bracket_atom() : organic_atom();
        p->atoms.push_back(std::move(atom));
        p->parent.push_back(prev);
        if (bond) {
          p->parent_bond.push_back(std::move(*bond));
        } else {
          Node dflt;
          dflt.kind = Kind::kBondDefault;
          p->parent_bond.push_back(dflt);
        }
        bond.reset();
        prev = static_cast<int>(p->atoms.size()) - 1;
      }
    }
    if (!branches.empty()) fail(text_, pos_, "unclosed '('");
    if (bond) fail(text_, pos_, "trailing bond");
    if (p->atoms.empty()) fail(text_, pos_, "empty query");
    return p;
  }

 private:
  static bool is_bond_start(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~'
           || c == '@' || c == '!';
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  int number(int fallback) {
    if (!std::isdigit(static_cast<unsigned char>(peek()))) return fallback;
    int v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek())))
      v = v * 10 + (text_[pos_++] - '0');
    return v;
  }

  static Node leaf(Kind kind, int value = 0, int flag = -1) {
    Node n;
    n.kind = kind;
    n.value = value;
    n.flag = flag;
    return n;
  }

  Node organic_atom() {
    const char c = text_[pos_++];
    switch (c) {
    case '*': return leaf(Kind::kTrue);
    case 'a': return leaf(Kind::kAromatic, 1);
    case 'A': return leaf(Kind::kAromatic, 0);
    case 'C':
      if (peek() == 'l') {
        ++pos_;
        return leaf(Kind::kElement, 17, 0);
      }
      return leaf(Kind::kElement, 6, 0);
    case 'B':
      if (peek() == 'r') {
        ++pos_;
        return leaf(Kind::kElement, 35, 0);
      }
      return leaf(Kind::kElement, 5, 0);
    case 'N': return leaf(Kind::kElement, 7, 0);
    case 'O': return leaf(Kind::kElement, 8, 0);
    case 'P': return leaf(Kind::kElement, 15, 0);
    case 'S': return leaf(Kind::kElement, 16, 0);
    case 'F': return leaf(Kind::kElement, 9, 0);
    case 'I': return leaf(Kind::kElement, 53, 0);
    case 'b': return leaf(Kind::kElement, 5, 1);
    case 'c': return leaf(Kind::kElement, 6, 1);
    case 'n': return leaf(Kind::kElement, 7, 1);
    case 'o': return leaf(Kind::kElement, 8, 1);
    case 'p': return leaf(Kind::kElement, 15, 1);
    case 's': return leaf(Kind::kElement, 16, 1);
    default: break;
    }
    fail(text_, pos_ - 1, std::string("unsupported atom '") + c + "'");
  }

  Node bracket_atom() {
    ++pos_;  // '['
    Node n = atom_low();
    if (peek() != ']') fail(text_, pos_, "expected ']'");
    ++pos_;
    return n;
  }

  // ';' binds loosest, then ',', then '&' or juxtaposition, then '!'.
  Node atom_low() {
    std::vector<Node> parts{atom_or()};
    while (peek() == ';') {
      ++pos_;
      parts.push_back(atom_or());
    }
    return combine(Kind::kAnd, std::move(parts));
  }

  Node atom_or() {
    std::vector<Node> parts{atom_and()};
    while (peek() == ',') {
      ++pos_;
      parts.push_back(atom_and());
    }
    return combine(Kind::kOr, std::move(parts));
  }

  Node atom_and() {
    std::vector<Node> parts{atom_not()};
    for (;;) {
      const char c = peek();
      if (c == '&') {
        ++pos_;
      } else if (c == '\0' || c == ']' || c == ',' || c == ';') {
        break;
      }
      parts.push_back(atom_not());
    }
    return combine(Kind::kAnd, std::move(parts));
  }

  Node atom_not() {
    if (peek() == '!') {
      ++pos_;
      Node n;
      n.kind = Kind::kNot;
      n.children.push_back(atom_not());
      return n;
    }
    return atom_primitive();
  }

  Node atom_primitive() {
    const std::size_t at = pos_;
    const char c = peek();
    if (c == '\0') fail(text_, at, "unexpected end");
    ++pos_;
    switch (c) {
    case '*': return leaf(Kind::kTrue);
    case 'a': return leaf(Kind::kAromatic, 1);
    case 'A': return leaf(Kind::kAromatic, 0);
    case '#': {
      const int z = number(-1);
      if (z < 0) fail(text_, at, "'#' needs an atomic number");
      return leaf(Kind::kElement, z, -1);
    }
    case 'H': return leaf(Kind::kHCount, number(1));
    case 'D': return leaf(Kind::kDegree, number(1));
    case 'X': return leaf(Kind::kTotalDegree, number(1));
    case 'v': return leaf(Kind::kValence, number(1));
    case 'R': {
      const int r = number(-1);
      if (r > 0) fail(text_, at, "ring counts other than R and R0");
      return leaf(Kind::kRing, r == 0 ? 0 : 1);
    }
    case '+':
    case '-': {
      const int sign = c == '+' ? 1 : -1;
      int magnitude = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        magnitude = number(0);
      } else {
        while (peek() == c) {
          ++pos_;
          ++magnitude;
        }
      }
      return leaf(Kind::kCharge, sign * magnitude);
    }
    case '$': {
      if (peek() != '(') fail(text_, at, "expected '(' after '$'");
      const std::size_t open = pos_;
      int depth = 0;
      for (; pos_ < text_.size(); ++pos_) {
        if (text_[pos_] == '(') ++depth;
        if (text_[pos_] == ')' && --depth == 0) break;
      }
      if (depth != 0) fail(text_, open, "unclosed '$('");
      const std::string_view inner = text_.substr(open + 1, pos_ - open - 1);
      ++pos_;
      Node n = leaf(Kind::kRecursive);
      n.sub = Parser(inner).pattern();
      return n;
    }
    default: break;
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::string symbol(1, c);
      if (std::islower(static_cast<unsigned char>(peek()))) {
        const std::string two = symbol + peek();
        if (atomic_number(two) != 0) {
          symbol = two;
          ++pos_;
        }
      }
      const int z = atomic_number(symbol);
      if (z == 0) fail(text_, at, "unknown element " + symbol);
      return leaf(Kind::kElement, z, 0);
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      const std::string symbol(1, static_cast<char>(std::toupper(c)));
      const int z = atomic_number(symbol);
      if (z == 0 || std::string_view("bcnops").find(c) == std::string_view::npos)
        fail(text_, at, std::string("unsupported aromatic atom '") + c + "'");
      return leaf(Kind::kElement, z, 1);
    }
    fail(text_, at, std::string("unsupported primitive '") + c + "'");
  }

  Node bond_expr() { return bond_low(); }

  Node bond_low() {
    std::vector<Node> parts{bond_or()};
    while (peek() == ';') {
      ++pos_;
      parts.push_back(bond_or());
    }
    return combine(Kind::kAnd, std::move(parts));
  }

  Node bond_or() {
    std::vector<Node> parts{bond_and()};
    while (peek() == ',') {
      ++pos_;
      parts.push_back(bond_and());
    }
    return combine(Kind::kOr, std::move(parts));
  }

  Node bond_and() {
    std::vector<Node> parts{bond_not()};
    for (;;) {
      const char c = peek();
      if (c == '&') {
        ++pos_;
      } else if (!is_bond_start(c)) {
        break;
      }
      parts.push_back(bond_not());
    }
    return combine(Kind::kAnd, std::move(parts));
  }

  Node bond_not() {
    if (peek() == '!') {
      ++pos_;
      Node n;
      n.kind = Kind::kNot;
      n.children.push_back(bond_not());
      return n;
    }
    const std::size_t at = pos_;
    switch (peek()) {
    case '-': ++pos_; return leaf(Kind::kBondOrder, static_cast<int>(BondOrder::kSingle));
    case '=': ++pos_; return leaf(Kind::kBondOrder, static_cast<int>(BondOrder::kDouble));
    case '#': ++pos_; return leaf(Kind::kBondOrder, static_cast<int>(BondOrder::kTriple));
    case ':': ++pos_; return leaf(Kind::kBondOrder, static_cast<int>(BondOrder::kAromatic));
    case '~': ++pos_; return leaf(Kind::kTrue);
    case '@': ++pos_; return leaf(Kind::kBondRing, 1);
    default: break;
    }
    fail(text_, at, "expected a bond primitive");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// matching
// ---------------------------------------------------------------------------

bool atom_ok(const Node &n, const MolView &mol, int i);

bool embed_from(const Query::Pattern &p, const MolView &mol,
                std::vector<int> &mapping, std::vector<bool> &used,
                std::size_t depth,
                const std::function<bool(const std::vector<int> &)> &emit);

bool bond_ok(const Node &n, const ViewBond &b) {
  switch (n.kind) {
  case Kind::kTrue: return true;
  case Kind::kBondOrder: return static_cast<int>(b.order) == n.value;
  case Kind::kBondDefault:
    return b.order == BondOrder::kSingle || b.order == BondOrder::kAromatic;
  case Kind::kBondRing: return b.in_ring == (n.value == 1);
  case Kind::kNot: return !bond_ok(n.children.front(), b);
  case Kind::kAnd:
    for (const Node &c : n.children)
      if (!bond_ok(c, b)) return false;
    return true;
  case Kind::kOr:
    for (const Node &c : n.children)
      if (bond_ok(c, b)) return true;
    return false;
  default: return false;
  }
}

bool rooted_match(const Query::Pattern &p, const MolView &mol, int root) {
  if (!atom_ok(p.atoms.front(), mol, root)) return false;
  std::vector<int> mapping(p.atoms.size(), -1);
  std::vector<bool> used(mol.atom_count(), false);
  mapping[0] = root;
  used[root] = true;
  return embed_from(p, mol, mapping, used, 1,
                    [](const std::vector<int> &) { return true; });
}

bool atom_ok(const Node &n, const MolView &mol, int i) {
  const ViewAtom &a = mol.atom(i);
  switch (n.kind) {
  case Kind::kTrue: return true;
  case Kind::kElement:
    return a.atomic_number == n.value
           && (n.flag < 0 || a.aromatic == (n.flag == 1));
  case Kind::kAromatic: return a.aromatic == (n.value == 1);
  case Kind::kHCount: return a.total_h == n.value;
  case Kind::kDegree: return a.degree == n.value;
  case Kind::kTotalDegree: return a.total_degree == n.value;
  case Kind::kValence: return a.valence == n.value;
  case Kind::kRing: return a.in_ring == (n.value == 1);
  case Kind::kCharge: return a.charge == n.value;
  case Kind::kRecursive: return rooted_match(*n.sub, mol, i);
  case Kind::kNot: return !atom_ok(n.children.front(), mol, i);
  case Kind::kAnd:
    for (const Node &c : n.children)
      if (!atom_ok(c, mol, i)) return false;
    return true;
  case Kind::kOr:
    for (const Node &c : n.children)
      if (atom_ok(c, mol, i)) return true;
    return false;
  default: return false;
  }
}

// Query atoms are stored so that each parent precedes its children, so every
// atom after the first extends from an already mapped neighbour. `emit`
// returns true to stop the search.
bool embed_from(const Query::Pattern &p, const MolView &mol,
                std::vector<int> &mapping, std::vector<bool> &used,
                std::size_t depth,
                const std::function<bool(const std::vector<int> &)> &emit) {
  if (depth == p.atoms.size()) return emit(mapping);
  const int anchor = mapping[p.parent[depth]];
  for (const smiles::Neighbor &nb : mol.neighbors(anchor)) {
    if (used[nb.atom]) continue;
    if (!bond_ok(p.parent_bond[depth], mol.bond(nb.bond))) continue;
    if (!atom_ok(p.atoms[depth], mol, nb.atom)) continue;
    mapping[depth] = nb.atom;
    used[nb.atom] = true;
    const bool stop = embed_from(p, mol, mapping, used, depth + 1, emit);
    used[nb.atom] = false;
    mapping[depth] = -1;
    if (stop) return true;
  }
  return false;
}

}  // namespace

Query Query::parse(std::string_view smarts) {
  Query q;
  q.text_ = std::string(smarts);
  q.pattern_ = Parser(q.text_).pattern();
  return q;
}

int Query::atom_count() const noexcept {
  return static_cast<int>(pattern_->atoms.size());
}

bool Query::matches_at(const MolView &mol, int atom) const {
  return rooted_match(*pattern_, mol, atom);
}

std::vector<std::vector<int>> Query::matches(const MolView &mol,
                                             bool unique) const {
  std::vector<std::vector<int>> out;
  std::set<std::vector<int>> seen;
  const Pattern &p = *pattern_;
  for (int root = 0; root < mol.atom_count(); ++root) {
    if (!atom_ok(p.atoms.front(), mol, root)) continue;
    std::vector<int> mapping(p.atoms.size(), -1);
    std::vector<bool> used(mol.atom_count(), false);
    mapping[0] = root;
    used[root] = true;
    embed_from(p, mol, mapping, used, 1, [&](const std::vector<int> &m) {
      if (unique) {
        std::vector<int> key(m);
        std::sort(key.begin(), key.end());
        if (!seen.insert(std::move(key)).second) return false;
      }
      out.push_back(m);
      return false;
    });
  }
  return out;
}

}  // namespace opforge::properties
