//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "opforge/error.hpp"
#include "opforge/properties.hpp"
#include "opforge/smiles.hpp"

namespace {

using namespace opforge;
using namespace opforge::properties;
namespace fs = std::filesystem;

const PropertyTables &tables() {
  static const PropertyTables t = PropertyTables::load(OPFORGE_DATA_DIR);
  return t;
}

DescriptorVector desc(std::string_view smiles) {
  return descriptors(smiles::parse(smiles), tables());
}

ErrorCode error_code_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "expected opforge::Error";
  return ErrorCode::kIoFailure;
}

// Rows of a TSV file with a #version line, comments and a column header.
struct Reference {
  std::vector<std::string> columns;
  std::vector<std::map<std::string, std::string>> rows;
};

Reference read_reference(const fs::path &path) {
  std::ifstream in(path);
  EXPECT_TRUE(in) << path;
  Reference ref;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (ref.columns.empty()) {
      ref.columns = fields;
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < fields.size(); ++i) row[ref.columns[i]] = fields[i];
    ref.rows.push_back(std::move(row));
  }
  return ref;
}

std::vector<std::vector<std::string>> read_data_rows(const fs::path &path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::vector<std::string> reference_smiles() {
  std::vector<std::string> out;
  for (const auto &r : read_reference(fs::path(OPFORGE_TEST_DATA_DIR) / "qed_reference.tsv").rows)
    out.push_back(r.at("smiles"));
  return out;
}

// Copy of the shipped tables in a scratch directory, for corruption tests.
fs::path scratch_tables(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("opforge_props_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const auto &e : fs::directory_iterator(OPFORGE_DATA_DIR))
    if (e.path().extension() == ".tsv") fs::copy_file(e.path(), dir / e.path().filename());
  return dir;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

TEST(Tables, LoadShippedData) {
  const PropertyTables &t = tables();
  EXPECT_FALSE(t.crippen().empty());
  EXPECT_FALSE(t.tpsa().empty());
  EXPECT_EQ(t.acceptors().size(), 11u);
  EXPECT_GE(t.alerts().size(), 30u);
  EXPECT_EQ(t.versions().size(), 6u);
  for (const auto &[file, version] : t.versions()) EXPECT_FALSE(version.empty()) << file;
  for (std::string_view e : {"H", "B", "C", "N", "O", "F", "P", "S", "Cl", "Br", "I"})
    EXPECT_GT(t.atomic_weight(e), 0.0) << e;
  EXPECT_DOUBLE_EQ(t.atomic_weight("H"), 1.008);
}

TEST(Tables, SharedIsLoadedOnce) {
  EXPECT_EQ(PropertyTables::shared().get(), PropertyTables::shared().get());
}

TEST(Tables, UnknownElementWeight) {
  EXPECT_EQ(error_code_of([] { tables().atomic_weight("Se"); }),
            ErrorCode::kUnknownElementWeight);
}

TEST(Tables, MissingDirectoryIsIoFailure) {
  EXPECT_EQ(error_code_of([] { PropertyTables::load("/nonexistent/opforge"); }),
            ErrorCode::kIoFailure);
}

TEST(Tables, MissingVersionLine) {
  const fs::path dir = scratch_tables("noversion");
  std::ofstream(dir / "atomic_weights.tsv") << "H\t1.008\n";
  EXPECT_EQ(error_code_of([&] { PropertyTables::load(dir); }),
            ErrorCode::kMalformedDataFile);
  fs::remove_all(dir);
}

TEST(Tables, MissingParserElementWeight) {
  const fs::path dir = scratch_tables("noweight");
  std::ofstream(dir / "atomic_weights.tsv") << "#version\tx\nH\t1.008\nC\t12.011\n";
  EXPECT_EQ(error_code_of([&] { PropertyTables::load(dir); }),
            ErrorCode::kMalformedDataFile);
  fs::remove_all(dir);
}

TEST(Tables, BadNumberReportsLine) {
  const fs::path dir = scratch_tables("badnumber");
  {
    std::ofstream out(dir / "crippen.tsv", std::ios::app);
    out << "CX\t[#6]\tnot-a-number\n";
  }
  try {
    PropertyTables::load(dir);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedDataFile);
    EXPECT_NE(std::string(e.what()).find("crippen.tsv:"), std::string::npos);
  }
  fs::remove_all(dir);
}

TEST(Tables, AlertMustParse) {
  const fs::path dir = scratch_tables("badalert");
  {
    std::ofstream out(dir / "alerts.tsv", std::ios::app);
    out << "broken\tC1CC\n";
  }
  EXPECT_EQ(error_code_of([&] { PropertyTables::load(dir); }),
            ErrorCode::kMalformedDataFile);
  fs::remove_all(dir);
}

TEST(Tables, DesirabilityParamsValidated) {
  const fs::path dir = scratch_tables("badparams");
  std::ofstream(dir / "qed_params.tsv")
      << "#version\tx\nMW\t1\t1\t1\t1\t0\t1\t1\n";
  EXPECT_EQ(error_code_of([&] { PropertyTables::load(dir); }),
            ErrorCode::kMalformedDataFile);
  fs::remove_all(dir);

  DesirabilityParams p;
  p.dmax = 0.0;
  EXPECT_EQ(error_code_of([&] { p.validate(); }), ErrorCode::kInvalidArgument);
  p.dmax = 1.0;
  p.f = 0.0;
  EXPECT_EQ(error_code_of([&] { p.validate(); }), ErrorCode::kInvalidArgument);
}

// ---------------------------------------------------------------------------
// Query engine
// ---------------------------------------------------------------------------

std::vector<int> matching_atoms(std::string_view smarts, std::string_view smiles,
                                bool expand = false) {
  const Query q = Query::parse(smarts);
  const smiles::MolecularGraph g = smiles::parse(smiles);
  const MolView view(g, expand);
  std::vector<int> out;
  for (int i = 0; i < view.atom_count(); ++i)
    if (q.matches_at(view, i)) out.push_back(i);
  return out;
}

TEST(Query, ElementsAndAromaticity) {
  EXPECT_EQ(matching_atoms("[#8]", "CCO"), std::vector<int>{2});
  EXPECT_EQ(matching_atoms("C", "Cc1ccccc1"), std::vector<int>{0});
  EXPECT_EQ(matching_atoms("c", "Cc1ccccc1").size(), 6u);
  EXPECT_EQ(matching_atoms("[a]", "c1ccncc1").size(), 6u);
  EXPECT_EQ(matching_atoms("[n]", "c1ccncc1"), std::vector<int>{3});
  EXPECT_EQ(matching_atoms("*", "CCO").size(), 3u);
  EXPECT_EQ(matching_atoms("[!#6]", "CCO"), std::vector<int>{2});
  EXPECT_EQ(matching_atoms("[Cl]", "CCl"), std::vector<int>{1});
}

TEST(Query, CountsAndCharges) {
  EXPECT_EQ(matching_atoms("[CH3]", "CC(C)O"), (std::vector<int>{0, 2}));
  EXPECT_EQ(matching_atoms("[CD3]", "CC(C)O"), std::vector<int>{1});
  EXPECT_EQ(matching_atoms("[CX4]", "CC=O"), std::vector<int>{0});
  EXPECT_EQ(matching_atoms("[Nv4]", "C[N+](C)(C)C"), std::vector<int>{1});
  EXPECT_EQ(matching_atoms("[N+]", "C[N+](=O)[O-]"), std::vector<int>{1});
  EXPECT_EQ(matching_atoms("[O-]", "C[N+](=O)[O-]"), std::vector<int>{3});
  EXPECT_EQ(matching_atoms("[O+0]", "C[N+](=O)[O-]"), std::vector<int>{2});
  EXPECT_EQ(matching_atoms("[N;!H0]", "CNC(=O)N(C)C"), std::vector<int>{1});
}

TEST(Query, RingsAndBonds) {
  EXPECT_EQ(matching_atoms("[CR]", "CC1CC1"), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(matching_atoms("[CR0]", "CC1CC1"), std::vector<int>{0});
  EXPECT_EQ(matching_atoms("C=O", "CC(=O)O"), std::vector<int>{1});
  EXPECT_EQ(matching_atoms("O-C", "CC(=O)O"), std::vector<int>{3});
  EXPECT_EQ(matching_atoms("O~C", "CC(=O)O"), (std::vector<int>{2, 3}));
  EXPECT_EQ(matching_atoms("C-!@C", "CC1CC1"), (std::vector<int>{0, 1}));
  EXPECT_EQ(matching_atoms("C@C", "CC1CC1"), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(matching_atoms("c:c", "c1ccccc1").size(), 6u);
}

TEST(Query, RecursiveAndOperators) {
  EXPECT_EQ(matching_atoms("[$(C=O)]", "CC(=O)O"), std::vector<int>{1});
  EXPECT_EQ(matching_atoms("[O;$(O[CX3]=O)]", "CC(=O)OC"), std::vector<int>{3});
  EXPECT_EQ(matching_atoms("[N,O]", "CNCO"), (std::vector<int>{1, 3}));
  EXPECT_EQ(matching_atoms("[C,N;H2]", "NCC"), (std::vector<int>{0, 1}));
  EXPECT_EQ(matching_atoms("[C,N&H2]", "NCC"), (std::vector<int>{0, 1, 2}));
}

TEST(Query, ExpandedHydrogens) {
  EXPECT_EQ(matching_atoms("[#1]", "CO", true).size(), 4u);
  EXPECT_EQ(matching_atoms("[#1]O", "CO", true).size(), 1u);
  EXPECT_EQ(matching_atoms("[CD4]", "C", true), std::vector<int>{0});
  EXPECT_TRUE(matching_atoms("[CD4]", "C", false).empty());
}

TEST(Query, UniqueMatches) {
  const Query q = Query::parse("CC");
  const smiles::MolecularGraph g = smiles::parse("CCC");
  const MolView view(g, false);
  EXPECT_EQ(q.matches(view, true).size(), 2u);
  EXPECT_EQ(q.matches(view, false).size(), 4u);
}

TEST(Query, UnsupportedSyntax) {
  for (std::string_view bad : {"C1CC1", "[C", "[R2]", "[Q]", "C(", "[$(C]"})
    EXPECT_EQ(error_code_of([&] { Query::parse(bad); }), ErrorCode::kMalformedDataFile)
        << bad;
}

// ---------------------------------------------------------------------------
// Descriptors
// ---------------------------------------------------------------------------

TEST(Descriptors, Methane) {
  const DescriptorVector v = desc("C");
  EXPECT_NEAR(v.mw, 16.04, 0.01);
  EXPECT_EQ(v.hbd, 0);
  EXPECT_EQ(v.hba, 0);
  EXPECT_EQ(v.rotb, 0);
  EXPECT_EQ(v.arom, 0);
  EXPECT_EQ(v.psa, 0.0);
}

TEST(Descriptors, Benzene) {
  const DescriptorVector v = desc("c1ccccc1");
  EXPECT_EQ(v.hbd, 0);
  EXPECT_EQ(v.hba, 0);
  EXPECT_EQ(v.psa, 0.0);
  EXPECT_EQ(v.arom, 1);
  EXPECT_EQ(v.rotb, 0);
}

TEST(Descriptors, Ethanol) {
  const DescriptorVector v = desc("CCO");
  EXPECT_EQ(v.hbd, 1);
  EXPECT_EQ(v.hba, 1);
  EXPECT_EQ(v.rotb, 0);
}

TEST(Descriptors, SarinGolden) {
  const Reference ref =
      read_reference(fs::path(OPFORGE_TEST_DATA_DIR) / "sarin_descriptors.tsv");
  ASSERT_EQ(ref.rows.size(), 1u);
  const auto &r = ref.rows[0];
  const DescriptorVector v = desc("CC(C)OP(C)(=O)F");
  EXPECT_NEAR(v.mw, std::stod(r.at("mw")), 1e-6);
  EXPECT_NEAR(v.alogp, std::stod(r.at("alogp")), 1e-6);
  EXPECT_EQ(v.hba, std::stoi(r.at("hba")));
  EXPECT_EQ(v.hbd, std::stoi(r.at("hbd")));
  EXPECT_NEAR(v.psa, std::stod(r.at("psa")), 1e-6);
  EXPECT_EQ(v.rotb, std::stoi(r.at("rotb")));
  EXPECT_EQ(v.arom, std::stoi(r.at("arom")));
  EXPECT_EQ(v.alerts, std::stoi(r.at("alerts")));
  EXPECT_NEAR(qed(v, tables()), std::stod(r.at("qed")), 0.05);
  EXPECT_NEAR(qed(v, tables()), std::stod(r.at("qed")), 1e-6);
}

// The reference rows agree with the oracle to its printed precision; the
// acceptance tolerances are looser.
TEST(Descriptors, ReferenceMolecules) {
  const Reference ref =
      read_reference(fs::path(OPFORGE_TEST_DATA_DIR) / "qed_reference.tsv");
  ASSERT_EQ(ref.rows.size(), 50u);
  for (const auto &r : ref.rows) {
    SCOPED_TRACE(r.at("name"));
    const DescriptorVector v = desc(r.at("smiles"));
    EXPECT_NEAR(v.mw, std::stod(r.at("mw")), 1e-6);
    EXPECT_NEAR(v.alogp, std::stod(r.at("alogp")), 1e-6);
    EXPECT_EQ(v.hba, std::stoi(r.at("hba")));
    EXPECT_EQ(v.hbd, std::stoi(r.at("hbd")));
    EXPECT_NEAR(v.psa, std::stod(r.at("psa")), 1e-6);
    EXPECT_EQ(v.rotb, std::stoi(r.at("rotb")));
    EXPECT_EQ(v.arom, std::stoi(r.at("arom")));
    EXPECT_EQ(v.alerts, std::stoi(r.at("alerts")));
    EXPECT_NEAR(qed(v, tables()), std::stod(r.at("qed")), 1e-7);
    EXPECT_NEAR(qed(v, tables(), {.zero_alerts = true}),
                std::stod(r.at("qed_no_alerts")), 1e-7);
  }
}

TEST(Descriptors, AlertsCounted) {
  EXPECT_EQ(desc("CCO").alerts, 0);
  EXPECT_GE(desc("C1OC1CC").alerts, 1);                 // epoxide
  EXPECT_GE(desc("CC(=O)Cl").alerts, 1);                // acyl halide
  EXPECT_GE(desc("c1ccccc1[N+](=O)[O-]").alerts, 1);    // nitro
}

TEST(Descriptors, UntypedAtom) {
  // A cationic chlorine has no logP row and no chlorine wildcard.
  const smiles::MolecularGraph g = smiles::parse("C[Cl+]C");
  ASSERT_TRUE(smiles::validate(g).valid);
  EXPECT_EQ(error_code_of([&] { descriptors(g, tables()); }), ErrorCode::kUntypedAtom);
}

TEST(Descriptors, ElementWithoutWeight) {
  const fs::path dir = scratch_tables("nofluorine");
  std::ofstream out(dir / "atomic_weights.tsv");
  out << "#version\tx\n";
  for (const auto &row : read_data_rows(fs::path(OPFORGE_DATA_DIR) / "atomic_weights.tsv"))
    if (row[0] != "F") out << row[0] << '\t' << row[1] << '\n';
  out.close();
  // Loading insists on every parser element.
  EXPECT_EQ(error_code_of([&] { PropertyTables::load(dir); }),
            ErrorCode::kMalformedDataFile);
  fs::remove_all(dir);
}

TEST(Descriptors, ScoreSmiles) {
  EXPECT_FALSE(score_smiles("C1CC", tables()).has_value());
  EXPECT_FALSE(score_smiles("C(C)(C)(C)(C)C", tables()).has_value());
  const auto s = score_smiles("CCO", tables());
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->descriptors, desc("CCO"));
  EXPECT_GT(s->qed, 0.0);
  EXPECT_LE(s->qed, 1.0);
}

// ---------------------------------------------------------------------------
// Desirability and QED
// ---------------------------------------------------------------------------

TEST(Desirability, MaximizerIsOne) {
  for (std::size_t k = 0; k < kDescriptorCount; ++k) {
    const DesirabilityParams &p = tables().desirability()[k];
    // Golden-section search for the peak around the curve centre.
    double lo = p.c - 4 * (p.d + std::abs(p.e) + std::abs(p.f)) - 10;
    double hi = p.c + 4 * (p.d + std::abs(p.e) + std::abs(p.f)) + 10;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
      const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      if (desirability(x1, p) < desirability(x2, p))
        lo = x1;
      else
        hi = x2;
    }
    EXPECT_NEAR(desirability((lo + hi) / 2, p), 1.0, 1e-6) << kDescriptorNames[k];
  }
}

TEST(Desirability, TailsAreClamped) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (const DesirabilityParams &p : tables().desirability()) {
    for (double x : {-inf, inf, -1e300, 1e300}) {
      const double d = desirability(x, p);
      EXPECT_GE(d, 1e-6);
      EXPECT_LE(d, 1.0);
    }
  }
}

TEST(Desirability, MolecularWeightAt305) {
  // Oracle: RDKit QED.ads(305, adsParameters["MW"]).
  EXPECT_NEAR(desirability(305.0, tables().desirability()[0]), 0.9999149914334344, 1e-6);
}

TEST(Qed, GeometricMeanOfEquals) {
  std::array<double, kDescriptorCount> d;
  d.fill(0.5);
  EXPECT_NEAR(qed_from_desirabilities(d), 0.5, 1e-12);
  d.fill(1.0);
  EXPECT_DOUBLE_EQ(qed_from_desirabilities(d), 1.0);
  for (double x : {1e-6, 0.123, 0.9}) {
    d.fill(x);
    EXPECT_NEAR(qed_from_desirabilities(d), x, 1e-12 * std::max(1.0, x));
  }
}

TEST(Qed, AlwaysInUnitInterval) {
  for (const std::string &s : reference_smiles()) {
    const double q = qed(desc(s), tables());
    EXPECT_GT(q, 0.0) << s;
    EXPECT_LE(q, 1.0) << s;
  }
  DescriptorVector extreme;
  extreme.mw = 1e6;
  extreme.alogp = -1e3;
  extreme.hba = 1000;
  extreme.rotb = 1000;
  extreme.alerts = 1000;
  EXPECT_GE(qed(extreme, tables()), 1e-6);
}

TEST(Qed, ZeroAlertsOption) {
  DescriptorVector v = desc("CC(=O)Cl");
  ASSERT_GT(v.alerts, 0);
  const double with = qed(v, tables());
  const double without = qed(v, tables(), {.zero_alerts = true});
  EXPECT_GT(without, with);
  v.alerts = 0;
  EXPECT_DOUBLE_EQ(qed(v, tables()), without);
}

// ---------------------------------------------------------------------------
// Invariants
// ---------------------------------------------------------------------------

smiles::MolecularGraph permuted(const smiles::MolecularGraph &g, std::mt19937 &rng) {
  std::vector<int> order(g.atom_count());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> where(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) where[order[i]] = static_cast<int>(i);
  smiles::MolecularGraph out;
  for (int old : order) out.add_atom(g.atom(old));
  std::vector<int> bonds(g.bond_count());
  std::iota(bonds.begin(), bonds.end(), 0);
  std::shuffle(bonds.begin(), bonds.end(), rng);
  for (int b : bonds) {
    const smiles::Bond &bond = g.bond(b);
    out.add_bond(where[bond.end], where[bond.begin], bond.order);
  }
  return out;
}

TEST(Invariants, AtomReindexing) {
  std::mt19937 rng(7);
  for (const std::string &s : reference_smiles()) {
    const smiles::MolecularGraph g = smiles::parse(s);
    const DescriptorVector ref = descriptors(g, tables());
    for (int trial = 0; trial < 3; ++trial) {
      const DescriptorVector v = descriptors(permuted(g, rng), tables());
      EXPECT_NEAR(v.mw, ref.mw, 1e-9) << s;
      EXPECT_NEAR(v.alogp, ref.alogp, 1e-9) << s;
      EXPECT_NEAR(v.psa, ref.psa, 1e-9) << s;
      EXPECT_EQ(v.hba, ref.hba) << s;
      EXPECT_EQ(v.hbd, ref.hbd) << s;
      EXPECT_EQ(v.rotb, ref.rotb) << s;
      EXPECT_EQ(v.arom, ref.arom) << s;
      EXPECT_EQ(v.alerts, ref.alerts) << s;
    }
  }
}

// Attaches a phenyl ring through a new single bond to `anchor`.
smiles::MolecularGraph with_phenyl(smiles::MolecularGraph g, int anchor) {
  smiles::Atom c;
  c.element = "C";
  c.aromatic = true;
  const int first = g.atom_count();
  for (int i = 0; i < 6; ++i) g.add_atom(c);
  for (int i = 0; i < 6; ++i)
    g.add_bond(first + i, first + (i + 1) % 6, smiles::BondOrder::kAromatic);
  g.add_bond(anchor, first, smiles::BondOrder::kSingle);
  return g;
}

TEST(Invariants, AddedArylRing) {
  int checked = 0;
  for (const std::string &s : reference_smiles()) {
    const smiles::MolecularGraph g = smiles::parse(s);
    const DescriptorVector base = descriptors(g, tables());
    for (int a = 0; a < g.atom_count(); ++a) {
      if (g.atom(a).bracket || smiles::implicit_hydrogens(g, a) == 0) continue;
      const smiles::MolecularGraph h = with_phenyl(g, a);
      ASSERT_TRUE(smiles::validate(h).valid) << s << " @" << a;
      const DescriptorVector v = descriptors(h, tables());
      EXPECT_EQ(v.arom, base.arom + 1) << s << " @" << a;
      EXPECT_GE(v.rotb, base.rotb) << s << " @" << a;
      ++checked;
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(Invariants, AlogpRecount) {
  // Sum the contribution of each assigned type, looked up in the file.
  std::map<std::string, double> contribution;
  for (const auto &row : read_data_rows(fs::path(OPFORGE_DATA_DIR) / "crippen.tsv"))
    contribution[row[0]] = std::stod(row[2]);
  for (const std::string &s : reference_smiles()) {
    const smiles::MolecularGraph g = smiles::parse(s);
    double sum = 0.0;
    for (const std::string &type : crippen_types(g, tables())) sum += contribution.at(type);
    const std::vector<double> per_atom = alogp_contributions(g, tables());
    EXPECT_NEAR(descriptors(g, tables()).alogp, sum, 1e-9) << s;
    EXPECT_NEAR(std::accumulate(per_atom.begin(), per_atom.end(), 0.0), sum, 1e-9) << s;
  }
}

// Brute-force polar surface: scan the table rows for each N/O atom.
double brute_force_psa(const smiles::MolecularGraph &g) {
  const auto rows = read_data_rows(fs::path(OPFORGE_DATA_DIR) / "tpsa.tsv");
  double total = 0.0;
  for (int i = 0; i < g.atom_count(); ++i) {
    const smiles::Atom &a = g.atom(i);
    if (a.element != "N" && a.element != "O") continue;
    int counts[4] = {0, 0, 0, 0};
    bool ring3 = false;
    const auto nbrs = g.neighbors(i);
    for (const auto &nb : nbrs) {
      switch (g.bond(nb.bond).order) {
      case smiles::BondOrder::kSingle: ++counts[0]; break;
      case smiles::BondOrder::kDouble: ++counts[1]; break;
      case smiles::BondOrder::kTriple: ++counts[2]; break;
      case smiles::BondOrder::kAromatic: ++counts[3]; break;
      }
      for (const auto &other : nbrs)
        if (other.atom != nb.atom && g.bond_between(nb.atom, other.atom)) ring3 = true;
    }
    const int h = smiles::total_hydrogens(g, i);
    const int degree = static_cast<int>(nbrs.size());
    const int key[8] = {degree, h, a.charge, counts[0], counts[1], counts[2], counts[3],
                        ring3 ? 1 : 0};
    bool found = false;
    for (const auto &row : rows) {
      if (row[0] != a.element) continue;
      bool ok = true;
      for (int k = 0; k < 8 && ok; ++k) ok = row[k + 1] == "*" || std::stoi(row[k + 1]) == key[k];
      if (ok) {
        total += std::stod(row[9]);
        found = true;
        break;
      }
    }
    if (found) continue;
    for (const auto &row : rows) {
      if (row[0] == "fallback" && row[1] == a.element)
        total += std::max(0.0, std::stod(row[2]) + std::stod(row[3]) * degree
                                   + std::stod(row[4]) * h);
    }
  }
  return total;
}

TEST(Invariants, PsaRecount) {
  for (const std::string &s : reference_smiles()) {
    const smiles::MolecularGraph g = smiles::parse(s);
    const std::vector<double> per_atom = psa_contributions(g, tables());
    const double v = descriptors(g, tables()).psa;
    EXPECT_NEAR(v, brute_force_psa(g), 1e-9) << s;
    EXPECT_NEAR(std::accumulate(per_atom.begin(), per_atom.end(), 0.0), v, 1e-9) << s;
  }
}

TEST(Invariants, MolecularWeightRecount) {
  const std::map<std::string, double> weight = {
      {"B", 10.812}, {"C", 12.011}, {"N", 14.007},  {"O", 15.999},
      {"F", 18.998}, {"P", 30.974}, {"S", 32.067},  {"Cl", 35.453},
      {"Br", 79.904}, {"I", 126.904}};
  for (const std::string &s : reference_smiles()) {
    const smiles::MolecularGraph g = smiles::parse(s);
    std::map<std::string, int> elements;
    int hydrogens = 0;
    for (int i = 0; i < g.atom_count(); ++i) {
      ++elements[g.atom(i).element];
      hydrogens += smiles::total_hydrogens(g, i);
    }
    double mw = 1.008 * hydrogens;
    for (const auto &[e, n] : elements) mw += weight.at(e) * n;
    EXPECT_NEAR(descriptors(g, tables()).mw, mw, 1e-9) << s;
  }
}

TEST(Invariants, CountsNonNegative) {
  for (const std::string &s : reference_smiles()) {
    const DescriptorVector v = desc(s);
    EXPECT_GT(v.mw, 0.0);
    EXPECT_GE(v.psa, 0.0);
    EXPECT_GE(v.hba, 0);
    EXPECT_GE(v.hbd, 0);
    EXPECT_GE(v.rotb, 0);
    EXPECT_GE(v.arom, 0);
    EXPECT_GE(v.alerts, 0);
  }
}

}  // namespace
