//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#ifndef OPFORGE_PROPERTIES_HPP_
#define OPFORGE_PROPERTIES_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opforge/query.hpp"
#include "opforge/smiles.hpp"

namespace opforge::properties {

inline constexpr int kDescriptorCount = 8;
inline constexpr std::array<std::string_view, kDescriptorCount> kDescriptorNames =
    {"MW", "ALOGP", "HBA", "HBD", "PSA", "ROTB", "AROM", "ALERTS"};

struct DescriptorVector {
  double mw = 0.0;     // g/mol
  double alogp = 0.0;
  int hba = 0;
  int hbd = 0;
  double psa = 0.0;    // A^2
  int rotb = 0;
  int arom = 0;
  int alerts = 0;

  // Values in kDescriptorNames order.
  std::array<double, kDescriptorCount> values() const;
  bool operator==(const DescriptorVector &) const = default;
};

struct DesirabilityParams {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 1.0, f = 1.0;
  double dmax = 1.0;  // normalization maximum

  // Throws Error(kInvalidArgument) when e or f is zero or dmax <= 0.
  void validate() const;
};

struct CrippenType {
  std::string type;
  Query query;
  double contribution;
};

struct TpsaRow {
  std::string element;
  // degree, h, charge, single, double, triple, aromatic, ring3; nullopt = any
  std::array<std::optional<int>, 8> key;
  double psa;
};

struct TpsaFallback {
  double base;
  double per_neighbor;
  double per_hydrogen;
};

struct Alert {
  std::string name;
  std::string smiles;
  smiles::MolecularGraph graph;
};

/// Immutable parameter tables read from `key<TAB>value...` files that start
/// with a `#version<TAB>...` line:
///   atomic_weights.tsv  element weight
///   crippen.tsv         type query logp
///   tpsa.tsv            element degree h charge single double triple
///                       aromatic ring3 psa, plus `fallback` rows
///   acceptors.tsv       name query
///   alerts.tsv          name smiles
///   qed_params.tsv      descriptor a b c d e f dmax
class PropertyTables {
 public:
  // Throws Error(kIoFailure) for unreadable files and
  // Error(kMalformedDataFile) for bad content.
  static PropertyTables load(const std::filesystem::path &dir);

  // $OPFORGE_DATA_DIR when set, else the directory compiled in.
  static std::filesystem::path default_data_dir();

  // Tables from default_data_dir(), loaded on first use and shared.
  static std::shared_ptr<const PropertyTables> shared();

  // Throws Error(kUnknownElementWeight).
  double atomic_weight(std::string_view element) const;

  const std::vector<CrippenType> &crippen() const noexcept { return crippen_; }
  const std::vector<TpsaRow> &tpsa() const noexcept { return tpsa_; }
  const std::map<std::string, TpsaFallback, std::less<>> &tpsa_fallback()
      const noexcept {
    return tpsa_fallback_;
  }
  const std::vector<Query> &acceptors() const noexcept { return acceptors_; }
  const std::vector<Alert> &alerts() const noexcept { return alerts_; }
  const std::array<DesirabilityParams, kDescriptorCount> &desirability()
      const noexcept {
    return desirability_;
  }

  // File name -> version string.
  const std::map<std::string, std::string> &versions() const noexcept {
    return versions_;
  }

 private:
  std::map<std::string, double, std::less<>> weights_;
  std::vector<CrippenType> crippen_;
  std::vector<TpsaRow> tpsa_;
  std::map<std::string, TpsaFallback, std::less<>> tpsa_fallback_;
  std::vector<Query> acceptors_;
  std::vector<Alert> alerts_;
  std::array<DesirabilityParams, kDescriptorCount> desirability_;
  std::map<std::string, std::string> versions_;
};

/// The eight QED descriptors of a validated graph. Atoms no logP row
/// matches take their element's wildcard row (`[#6]`, `[#7]`, ...) when the
/// table has one, which it always does for C, H, N and O.
/// Errors: kUnknownElementWeight, kUntypedAtom.
DescriptorVector descriptors(const smiles::MolecularGraph &graph,
                             const PropertyTables &tables);

// Per-atom logP contributions with each heavy atom's hydrogens folded in,
// indexed like the graph. Their sum is the ALOGP descriptor.
std::vector<double> alogp_contributions(const smiles::MolecularGraph &graph,
                                        const PropertyTables &tables);

// Crippen type of every heavy atom followed by the type of each hydrogen
// attached to it, in graph order.
std::vector<std::string> crippen_types(const smiles::MolecularGraph &graph,
                                       const PropertyTables &tables);

// Per-atom polar surface contributions; their sum is the PSA descriptor.
std::vector<double> psa_contributions(const smiles::MolecularGraph &graph,
                                      const PropertyTables &tables);

/// Asymmetric double sigmoid scaled by p.dmax, clamped to [1e-6, 1].
double desirability(double x, const DesirabilityParams &p);

struct QedOptions {
  bool zero_alerts = false;  // score ALERTS as 0 regardless of matches
};

// Unweighted geometric mean exp(mean ln d_i) of eight desirabilities.
double qed_from_desirabilities(const std::array<double, kDescriptorCount> &d);

/// Unweighted geometric mean of the eight desirabilities.
double qed(const DescriptorVector &v, const PropertyTables &tables,
           const QedOptions &options = {});

// descriptors + qed for a SMILES string; nullopt when it does not parse or
// validate.
struct Scored {
  DescriptorVector descriptors;
  double qed;
};
std::optional<Scored> score_smiles(std::string_view smiles,
                                   const PropertyTables &tables,
                                   const QedOptions &options = {});

}  // namespace opforge::properties

#endif  // OPFORGE_PROPERTIES_HPP_
