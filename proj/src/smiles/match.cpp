//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "opforge/error.hpp"
#include "opforge/smiles.hpp"

namespace opforge::smiles {
namespace {

// Backtracking subgraph monomorphism. Pattern atoms are visited in BFS order
// so every atom after the first of its component has an already-mapped
// anchor, which keeps the candidate lists down to the anchor's neighbours.
class Matcher {
 public:
  Matcher(const MolecularGraph &target, const MolecularGraph &pattern,
          bool stop_at_first)
      : target_(target), pattern_(pattern), stop_at_first_(stop_at_first),
        mapping_(pattern.atom_count(), -1),
        used_(target.atom_count(), false) {
    build_order();
  }

  std::size_t run() {
    if (pattern_.atom_count() == 0
        || pattern_.atom_count() > target_.atom_count())
      return 0;
    extend(0);
    return found_.size();
  }

 private:
  void build_order() {
    const int n = pattern_.atom_count();
    std::vector<bool> seen(n, false);
    for (int root = 0; root < n; ++root) {
      if (seen[root]) continue;
      seen[root] = true;
      std::deque<int> queue{root};
      anchor_.push_back(-1);
      order_.push_back(root);
      while (!queue.empty()) {
        const int a = queue.front();
        queue.pop_front();
        for (const Neighbor &nb : pattern_.neighbors(a)) {
          if (seen[nb.atom]) continue;
          seen[nb.atom] = true;
          order_.push_back(nb.atom);
          anchor_.push_back(a);
          queue.push_back(nb.atom);
        }
      }
    }
  }

  bool atoms_match(int p, int t) const {
    const Atom &pa = pattern_.atom(p);
    const Atom &ta = target_.atom(t);
    return pa.element == ta.element && pa.aromatic == ta.aromatic;
  }

  bool bonds_consistent(int p, int t) const {
    for (const Neighbor &nb : pattern_.neighbors(p)) {
      const int mapped = mapping_[nb.atom];
      if (mapped < 0) continue;
      auto tb = target_.bond_between(t, mapped);
      if (!tb || target_.bond(*tb).order != pattern_.bond(nb.bond).order)
        return false;
    }
    return true;
  }

  bool done() const { return stop_at_first_ && !found_.empty(); }

  void try_candidate(std::size_t depth, int p, int t) {
    if (used_[t] || !atoms_match(p, t) || !bonds_consistent(p, t)) return;
    mapping_[p] = t;
    used_[t] = true;
    extend(depth + 1);
    used_[t] = false;
    mapping_[p] = -1;
  }

  void extend(std::size_t depth) {
    if (done()) return;
    if (depth == order_.size()) {
      std::vector<int> atoms(mapping_);
      std::sort(atoms.begin(), atoms.end());
      found_.insert(std::move(atoms));
      return;
    }
    const int p = order_[depth];
    const int anchor = anchor_[depth];
    if (anchor < 0) {
      for (int t = 0; t < target_.atom_count() && !done(); ++t)
        try_candidate(depth, p, t);
    } else {
      for (const Neighbor &nb : target_.neighbors(mapping_[anchor])) {
        if (done()) break;
        try_candidate(depth, p, nb.atom);
      }
    }
  }

  const MolecularGraph &target_;
  const MolecularGraph &pattern_;
  bool stop_at_first_;
  std::vector<int> order_;
  std::vector<int> anchor_;
  std::vector<int> mapping_;
  std::vector<bool> used_;
  std::set<std::vector<int>> found_;
};

void check_size(const MolecularGraph &pattern) {
  if (pattern.atom_count() > kMaxPatternAtoms) {
    throw Error(ErrorCode::kPatternTooLarge,
                "pattern has " + std::to_string(pattern.atom_count())
                    + " atoms; limit is " + std::to_string(kMaxPatternAtoms));
  }
}

}  // namespace

std::size_t match_substructure(const MolecularGraph &target,
                               const MolecularGraph &pattern) {
  check_size(pattern);
  return Matcher(target, pattern, false).run();
}

bool has_substructure(const MolecularGraph &target,
                      const MolecularGraph &pattern) {
  check_size(pattern);
  return Matcher(target, pattern, true).run() > 0;
}

}  // namespace opforge::smiles
