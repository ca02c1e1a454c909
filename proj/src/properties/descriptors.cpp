//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "opforge/error.hpp"
#include "opforge/properties.hpp"

namespace opforge::properties {

using smiles::BondOrder;
using smiles::MolecularGraph;

namespace {

const Query &donor_query() {
  static const Query q = Query::parse(
      "[$([N;!H0;v3]),$([N;!H0;+1;v4]),$([O,S;H1;+0]),$([n;H1;+0])]");
  return q;
}

// Single non-ring bond between non-terminal atoms, skipping triple-bonded
// atoms, CX3 and tert-butyl groups and amide/thioamide/amidine C-N bonds.
const Query &rotor_query() {
  static const Query q = Query::parse(
      "[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)"
      "&!$(C([CH3])([CH3])[CH3])&!$([CD3](=[N,O,S])-!@[#7,O,S!D1])"
      "&!$([#7,O,S!D1]-!@[CD3]=[N,O,S])&!$([CD3](=[N+])-!@[#7!D1])"
      "&!$([#7!D1]-!@[CD3]=[N+])]-,:;!@"
      "[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)"
      "&!$(C([CH3])([CH3])[CH3])]");
  return q;
}

// Aliphatic ring atoms bonded to anything non-aromatic; removing them
// leaves only aromatic ring systems.
const Query &aliphatic_ring_query() {
  static const Query q = Query::parse("[$([A;R][!a])]");
  return q;
}

int count_atoms(const MolView &view, int n, const Query &q) {
  int count = 0;
  for (int i = 0; i < n; ++i) count += q.matches_at(view, i) ? 1 : 0;
  return count;
}

struct Typing {
  std::vector<const CrippenType *> heavy;             // per graph atom
  std::vector<std::vector<const CrippenType *>> hyd;  // per graph atom
};

Typing crippen_typing(const MolecularGraph &graph, const PropertyTables &tables) {
  const MolView view(graph, true);
  const int n = graph.atom_count();
  Typing t;
  t.heavy.resize(n, nullptr);
  t.hyd.resize(n);
  for (int i = 0; i < view.atom_count(); ++i) {
    const CrippenType *type = nullptr;
    for (const CrippenType &c : tables.crippen()) {
      if (c.query.matches_at(view, i)) {
        type = &c;
        break;
      }
    }
    const int owner = i < n ? i : view.neighbors(i).front().atom;
    if (!type) {
      throw Error(ErrorCode::kUntypedAtom,
                  "no logP type for " + (i < n ? graph.atom(i).element
                                                : std::string("H"))
                      + " at atom " + std::to_string(owner),
                  owner);
    }
    if (i < n)
      t.heavy[i] = type;
    else
      t.hyd[owner].push_back(type);
  }
  return t;
}

double atom_psa(const MolecularGraph &graph, int i, const PropertyTables &tables,
                const std::vector<bool> &in_ring3) {
  const smiles::Atom &a = graph.atom(i);
  if (a.element != "N" && a.element != "O") return 0.0;
  int single = 0, dbl = 0, triple = 0, arom = 0;
  for (const smiles::Neighbor &nb : graph.neighbors(i)) {
    switch (graph.bond(nb.bond).order) {
    case BondOrder::kSingle: ++single; break;
    case BondOrder::kDouble: ++dbl; break;
    case BondOrder::kTriple: ++triple; break;
    case BondOrder::kAromatic: ++arom; break;
    }
  }
  const int degree = static_cast<int>(graph.neighbors(i).size());
  const int h = smiles::total_hydrogens(graph, i);
  const std::array<int, 8> key = {degree, h,      a.charge, single,
                                  dbl,    triple, arom,     in_ring3[i] ? 1 : 0};
  for (const TpsaRow &row : tables.tpsa()) {
    if (row.element != a.element) continue;
    bool ok = true;
    for (std::size_t k = 0; k < key.size() && ok; ++k)
      ok = !row.key[k] || *row.key[k] == key[k];
    if (ok) return row.psa;
  }
  auto fb = tables.tpsa_fallback().find(a.element);
  if (fb == tables.tpsa_fallback().end()) return 0.0;
  const TpsaFallback &f = fb->second;
  return std::max(0.0, f.base + f.per_neighbor * degree + f.per_hydrogen * h);
}

// Atoms on a three-membered ring: two neighbours that are bonded to each
// other.
std::vector<bool> three_ring_atoms(const MolecularGraph &graph) {
  std::vector<bool> out(graph.atom_count(), false);
  for (int i = 0; i < graph.atom_count(); ++i) {
    auto nbrs = graph.neighbors(i);
    for (std::size_t x = 0; x < nbrs.size() && !out[i]; ++x)
      for (std::size_t y = x + 1; y < nbrs.size() && !out[i]; ++y)
        if (graph.bond_between(nbrs[x].atom, nbrs[y].atom)) out[i] = true;
  }
  return out;
}

}  // namespace

std::array<double, kDescriptorCount> DescriptorVector::values() const {
  return {mw,
          alogp,
          static_cast<double>(hba),
          static_cast<double>(hbd),
          psa,
          static_cast<double>(rotb),
          static_cast<double>(arom),
          static_cast<double>(alerts)};
}

std::vector<std::string> crippen_types(const MolecularGraph &graph,
                                       const PropertyTables &tables) {
  const Typing t = crippen_typing(graph, tables);
  std::vector<std::string> out;
  for (int i = 0; i < graph.atom_count(); ++i) {
    out.push_back(t.heavy[i]->type);
    for (const CrippenType *h : t.hyd[i]) out.push_back(h->type);
  }
  return out;
}

std::vector<double> alogp_contributions(const MolecularGraph &graph,
                                        const PropertyTables &tables) {
  const Typing t = crippen_typing(graph, tables);
  std::vector<double> out(graph.atom_count(), 0.0);
  for (int i = 0; i < graph.atom_count(); ++i) {
    out[i] = t.heavy[i]->contribution;
    for (const CrippenType *h : t.hyd[i]) out[i] += h->contribution;
  }
  return out;
}

std::vector<double> psa_contributions(const MolecularGraph &graph,
                                      const PropertyTables &tables) {
  const std::vector<bool> ring3 = three_ring_atoms(graph);
  std::vector<double> out(graph.atom_count(), 0.0);
  for (int i = 0; i < graph.atom_count(); ++i)
    out[i] = atom_psa(graph, i, tables, ring3);
  return out;
}

DescriptorVector descriptors(const MolecularGraph &graph,
                             const PropertyTables &tables) {
  DescriptorVector v;
  const int n = graph.atom_count();
  const double h_weight = tables.atomic_weight("H");
  for (int i = 0; i < n; ++i) {
    v.mw += tables.atomic_weight(graph.atom(i).element)
            + h_weight * smiles::total_hydrogens(graph, i);
  }

  for (double c : alogp_contributions(graph, tables)) v.alogp += c;
  for (double c : psa_contributions(graph, tables)) v.psa += c;

  const MolView view(graph, false);
  for (const Query &q : tables.acceptors()) v.hba += count_atoms(view, n, q);
  v.hbd = count_atoms(view, n, donor_query());
  v.rotb = static_cast<int>(rotor_query().matches(view).size());

  std::vector<bool> keep(n, true);
  for (int i = 0; i < n; ++i)
    keep[i] = !aliphatic_ring_query().matches_at(view, i);
  v.arom = smiles::cycle_rank(graph, keep);

  for (const Alert &a : tables.alerts())
    v.alerts += smiles::has_substructure(graph, a.graph) ? 1 : 0;
  return v;
}

double desirability(double x, const DesirabilityParams &p) {
  const double rise = 1.0 / (1.0 + std::exp(-(x - p.c + p.d / 2.0) / p.e));
  const double fall = 1.0 - 1.0 / (1.0 + std::exp(-(x - p.c - p.d / 2.0) / p.f));
  const double d = (p.a + p.b * rise * fall) / p.dmax;
  if (!(d >= 1e-6)) return 1e-6;
  return std::min(d, 1.0);
}

double qed_from_desirabilities(const std::array<double, kDescriptorCount> &d) {
  double log_sum = 0.0;
  for (double v : d) log_sum += std::log(v);
  return std::exp(log_sum / kDescriptorCount);
}

double qed(const DescriptorVector &v, const PropertyTables &tables,
           const QedOptions &options) {
  auto x = v.values();
  if (options.zero_alerts) x[7] = 0.0;
  std::array<double, kDescriptorCount> d;
  for (std::size_t k = 0; k < kDescriptorCount; ++k)
    d[k] = desirability(x[k], tables.desirability()[k]);
  return qed_from_desirabilities(d);
}

std::optional<Scored> score_smiles(std::string_view text,
                                   const PropertyTables &tables,
                                   const QedOptions &options) {
  MolecularGraph graph;
  try {
    graph = smiles::parse(text);
  } catch (const Error &) {
    return std::nullopt;
  }
  if (!smiles::validate(graph).valid) return std::nullopt;
  Scored s;
  s.descriptors = descriptors(graph, tables);
  s.qed = qed(s.descriptors, tables, options);
  return s;
}

}  // namespace opforge::properties
