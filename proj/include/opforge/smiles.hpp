//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#ifndef OPFORGE_SMILES_HPP_
#define OPFORGE_SMILES_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opforge::smiles {

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class TokenKind : std::uint8_t {
  kAtom,
  kAromaticAtom,
  kBracketAtom,
  kBond,
  kBranchOpen,
  kBranchClose,
  kRingBond,
  kSpecial,
};

struct Token {
  std::string text;
  TokenKind kind;

  bool operator==(const Token &) const = default;
};

inline constexpr std::string_view kPadText = "<PAD>";
inline constexpr std::string_view kBosText = "<BOS>";
inline constexpr std::string_view kEosText = "<EOS>";

/// Greedy longest-match segmentation of a SMILES string. Two-letter organic
/// atoms (Cl, Br) win over single letters; a bracket atom is one token.
///
/// Throws Error(kUnknownCharacter) or Error(kUnterminatedBracket) with the
/// offending character offset as position.
std::vector<Token> tokenize(std::string_view smiles);

/// Concatenates token texts. Throws Error(kSpecialTokenPresent).
std::string detokenize(std::span<const Token> tokens);

/// Rebuilds a token (with kind) from its text, e.g. when decoding ids.
Token make_token(std::string_view text);

/// Element symbol carried by an atom token ("c" -> "C", "[NH3+]" -> "N"),
/// or nullopt for non-atom tokens.
std::optional<std::string> token_element(const Token &token);

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;

  Vocabulary();

  // PAD, BOS, EOS followed by every distinct corpus token sorted by text.
  static Vocabulary build(std::span<const std::vector<Token>> corpus);

  // Restores an id-ordered token list (e.g. from a checkpoint header).
  static Vocabulary from_texts(std::vector<std::string> texts);

  int size() const noexcept { return static_cast<int>(texts_.size()); }
  std::optional<int> find(std::string_view text) const;
  const std::string &text(int id) const;
  const std::vector<std::string> &texts() const noexcept { return texts_; }

  // Throws Error(kUnknownToken) naming the first token not in the vocabulary.
  std::vector<int> encode(std::span<const Token> tokens) const;
  std::vector<Token> decode(std::span<const int> ids) const;

  bool operator==(const Vocabulary &other) const {
    return texts_ == other.texts_;
  }

 private:
  std::vector<std::string> texts_;
  std::map<std::string, int, std::less<>> index_;
};

// ---------------------------------------------------------------------------
// Molecular graph
// ---------------------------------------------------------------------------

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

// Bond order as an integer valence contribution; aromatic counts 1.
int valence_contribution(BondOrder order) noexcept;

struct Atom {
  std::string element;  // capitalised symbol: "C", "Cl", "N"
  int charge = 0;
  bool aromatic = false;
  int explicit_hydrogens = 0;
  bool bracket = false;  // bracket atoms never receive implicit hydrogens

  bool operator==(const Atom &) const = default;
};

struct Bond {
  int begin;
  int end;
  BondOrder order;

  int other(int atom) const noexcept { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

class MolecularGraph {
 public:
  int add_atom(Atom atom);

  // Rejects self loops, duplicate bonds and out-of-range endpoints with
  // Error(kInvalidArgument).
  int add_bond(int begin, int end, BondOrder order);
  void set_bond_order(int bond, BondOrder order) { bonds_[bond].order = order; }

  int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  int bond_count() const noexcept { return static_cast<int>(bonds_.size()); }

  const std::vector<Atom> &atoms() const noexcept { return atoms_; }
  const std::vector<Bond> &bonds() const noexcept { return bonds_; }
  const Atom &atom(int i) const { return atoms_[i]; }
  const Bond &bond(int i) const { return bonds_[i]; }
  std::span<const Neighbor> neighbors(int atom) const {
    return adjacency_[atom];
  }
  std::optional<int> bond_between(int a, int b) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Builds a graph from SMILES. Stereo marks, isotopes and atom classes are
/// accepted and dropped. Multi-fragment input is rejected. An aromatic bond
/// outside every ring (the biaryl link in "c1ccccc1c1ccccc1") becomes single.
///
/// Errors: kEmptyInput, kUnmatchedRingBond, kInvalidRingClosure,
/// kUnmatchedParenthesis, kDanglingBond, kSingleFragmentOnly,
/// kInvalidBracketAtom, plus the tokenizer errors.
MolecularGraph parse(std::string_view smiles);

// Allowed valences for an element in a charge state; empty when the element
// is outside the supported set.
std::vector<int> allowed_valences(std::string_view element, int charge);

// Sum of bond valence contributions (aromatic bonds count 1).
int bond_order_sum(const MolecularGraph &graph, int atom);

int implicit_hydrogens(const MolecularGraph &graph, int atom);

inline int total_hydrogens(const MolecularGraph &graph, int atom) {
  return graph.atom(atom).explicit_hydrogens + implicit_hydrogens(graph, atom);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ValidityCode : std::uint8_t {
  kValenceExceeded,
  kUnsupportedElement,
  kAromaticOutsideRing,
};

struct ValidityError {
  ValidityCode code;
  int atom;
  std::string message;
};

struct ValidityReport {
  bool valid = true;
  std::vector<ValidityError> errors;
};

ValidityReport validate(const MolecularGraph &graph);

// parse + validate without throwing.
bool is_valid_smiles(std::string_view smiles);

// ---------------------------------------------------------------------------
// Ring membership
// ---------------------------------------------------------------------------

// A bond is a ring bond iff it is not a bridge of the graph.
std::vector<bool> ring_bonds(const MolecularGraph &graph);
std::vector<bool> ring_atoms(const MolecularGraph &graph);

// Cyclomatic number of the subgraph induced by `keep` (edges - vertices +
// connected components).
int cycle_rank(const MolecularGraph &graph, const std::vector<bool> &keep);

// ---------------------------------------------------------------------------
// Substructure matching
// ---------------------------------------------------------------------------

inline constexpr int kMaxPatternAtoms = 24;

/// Number of distinct target atom sets onto which `pattern` embeds while
/// preserving element, aromatic flag and bond order. Throws
/// Error(kPatternTooLarge) above kMaxPatternAtoms.
std::size_t match_substructure(const MolecularGraph &target,
                               const MolecularGraph &pattern);

bool has_substructure(const MolecularGraph &target,
                      const MolecularGraph &pattern);

}  // namespace opforge::smiles

#endif  // OPFORGE_SMILES_HPP_
