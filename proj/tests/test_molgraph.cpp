#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "autoqsar/errors.hpp"
#include "autoqsar/molgraph.hpp"
#include "support/molgen.hpp"
#include "support/oracles.hpp"

using namespace autoqsar;

TEST_CASE("methane") {
  Molecule m = parse_smiles("C");
  REQUIRE(m.atom_count() == 1);
  CHECK(m.atoms[0].implicit_h == 4);
  CHECK(m.rings.empty());
  CHECK(m.atoms[0].degree == 0);
}

TEST_CASE("benzene") {
  Molecule m = parse_smiles("c1ccccc1");
  REQUIRE(m.atom_count() == 6);
  REQUIRE(m.bond_count() == 6);
  for (const Atom& a : m.atoms) {
    CHECK(a.aromatic);
    CHECK(a.element == Element::C);
    CHECK(a.implicit_h == 1);
  }
  REQUIRE(m.rings.size() == 1);
  CHECK(m.rings[0].size() == 6);
}

TEST_CASE("isobutane topology") {
  Molecule m = parse_smiles("CC(C)C");
  REQUIRE(m.atom_count() == 4);
  std::vector<int> degrees;
  for (const Atom& a : m.atoms) degrees.push_back(a.degree);
  std::sort(degrees.begin(), degrees.end());
  CHECK(degrees == std::vector<int>{1, 1, 1, 3});
}

TEST_CASE("implicit hydrogen assignment") {
  CHECK(parse_smiles("CCO").atoms[2].implicit_h == 1);   // hydroxyl O
  CHECK(parse_smiles("N").atoms[0].implicit_h == 3);     // ammonia
  CHECK(parse_smiles("C=O").atoms[0].implicit_h == 2);   // formaldehyde C
  CHECK(parse_smiles("C#N").atoms[1].implicit_h == 0);   // nitrile N
  CHECK(parse_smiles("N(=O)=O").atoms[0].implicit_h == 1);  // pentavalent N
  CHECK(parse_smiles("c1ccncc1").atoms[3].implicit_h == 0); // pyridine N
  CHECK(parse_smiles("c1cc[nH]c1").atoms[3].implicit_h == 1);  // pyrrole N
  CHECK(parse_smiles("c1ccoc1").atoms[3].implicit_h == 0);  // furan O
  CHECK(parse_smiles("c1ccsc1").atoms[3].implicit_h == 0);  // thiophene S
}

TEST_CASE("bracket atoms: charge, isotope, explicit H") {
  Molecule anion = parse_smiles("[O-]C");
  CHECK(anion.atoms[0].formal_charge == -1);
  CHECK(anion.atoms[0].implicit_h == 0);

  Molecule ammonium = parse_smiles("[NH4+]");
  CHECK(ammonium.atoms[0].formal_charge == 1);
  CHECK(ammonium.atoms[0].implicit_h == 4);

  Molecule labeled = parse_smiles("[13CH4]");
  CHECK(labeled.atoms[0].implicit_h == 4);

  Molecule dication = parse_smiles("[S++]");
  CHECK(dication.atoms[0].formal_charge == 2);
  CHECK(parse_smiles("[S+2]").atoms[0].formal_charge == 2);
}

TEST_CASE("explicit hydrogens collapse into neighbors") {
  Molecule m = parse_smiles("C([H])([H])([H])[H]");
  REQUIRE(m.atom_count() == 1);
  CHECK(m.atoms[0].implicit_h == 4);
  CHECK(structure_key(m) == structure_key(parse_smiles("C")));
}

TEST_CASE("stereo markers accepted and discarded") {
  Molecule m = parse_smiles("C/C=C\\C");
  CHECK(m.atom_count() == 4);
  CHECK(m.bonds[1].order == BondOrder::Double);
  Molecule chiral = parse_smiles("N[C@@H](C)C(=O)O");
  CHECK(chiral.atom_count() == 6);
}

TEST_CASE("largest fragment retained") {
  Molecule m = parse_smiles("CCO.O");  // ethanol hydrate: keep the ethanol
  CHECK(m.atom_count() == 3);
  CHECK(m.source_smiles == "CCO.O");
}

TEST_CASE("largest fragment: salt forms") {
  Molecule m = parse_smiles("CCN.[Cl-]");
  CHECK(m.atom_count() == 3);
  for (const Atom& a : m.atoms) CHECK(a.element != Element::Cl);
  // tie on heavy atoms: first fragment wins deterministically
  Molecule tie = parse_smiles("CO.CN");
  REQUIRE(tie.atom_count() == 2);
  CHECK(tie.atoms[1].element == Element::O);
}

TEST_CASE("kekule benzene is flagged aromatic") {
  Molecule kek = parse_smiles("C1=CC=CC=C1");
  for (const Atom& a : kek.atoms) CHECK(a.aromatic);
  for (const Bond& b : kek.bonds) CHECK(b.order == BondOrder::Aromatic);
  CHECK(structure_key(kek) == structure_key(parse_smiles("c1ccccc1")));
  // cyclohexene stays non-aromatic
  Molecule ene = parse_smiles("C1=CCCCC1");
  int aromatic = 0;
  for (const Atom& a : ene.atoms) aromatic += a.aromatic ? 1 : 0;
  CHECK(aromatic == 0);
}

TEST_CASE("ring closures including %nn") {
  Molecule m = parse_smiles("C%12CCCCC%12");
  CHECK(m.rings.size() == 1);
  Molecule naphthalene = parse_smiles("c1ccc2ccccc2c1");
  CHECK(naphthalene.atom_count() == 10);
  CHECK(naphthalene.rings.size() == 2);
  CHECK(naphthalene.rings[0].size() == 6);
  CHECK(naphthalene.rings[1].size() == 6);
}

TEST_CASE("ring count equals bonds - atoms + 1") {
  for (const char* smi :
       {"C1CC1", "C1CCC1", "c1ccccc1", "C1CC2CCC1CC2", "C1CC12CC2", "CC(C)C"}) {
    Molecule m = parse_smiles(smi);
    CHECK(static_cast<int>(m.rings.size()) == m.bond_count() - m.atom_count() + 1);
  }
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_smiles(""), SmilesError);
  CHECK_THROWS_AS(parse_smiles("C(("), SmilesError);
  CHECK_THROWS_AS(parse_smiles("C)"), SmilesError);
  CHECK_THROWS_AS(parse_smiles("C1CC"), SmilesError);      // unclosed ring
  CHECK_THROWS_AS(parse_smiles("C="), SmilesError);        // dangling bond
  CHECK_THROWS_AS(parse_smiles("CX"), SmilesError);        // unsupported element
  CHECK_THROWS_AS(parse_smiles("[Si](C)(C)C"), SmilesError);
  CHECK_THROWS_AS(parse_smiles("C(F)(F)(F)(F)F"), SmilesError);  // 5 bonds on C
  CHECK_THROWS_AS(parse_smiles("O=C=O=O"), SmilesError);   // valence on O
  CHECK_THROWS_AS(parse_smiles("C11"), SmilesError);       // self ring bond
  CHECK_THROWS_AS(parse_smiles("C12CC12"), SmilesError);   // duplicate bond
  CHECK_THROWS_AS(parse_smiles("C=1CCCCC-1"), SmilesError);  // conflicting orders
  CHECK_THROWS_AS(parse_smiles("H"), SmilesError);
  CHECK_THROWS_AS(parse_smiles("[C"), SmilesError);

  try {
    parse_smiles("CC(C)X");
  } catch (const SmilesError& e) {
    CHECK(e.position() == 5);
    CHECK(std::string(e.what()).find("position 5") != std::string::npos);
  }
}

TEST_CASE("round-trip stability") {
  const std::string smi = "CC(=O)Oc1ccccc1C(=O)O";  // aspirin
  Molecule a = parse_smiles(smi);
  Molecule b = parse_smiles(smi);
  REQUIRE(a.atom_count() == b.atom_count());
  REQUIRE(a.bond_count() == b.bond_count());
  for (int i = 0; i < a.atom_count(); ++i) {
    CHECK(a.atoms[i].element == b.atoms[i].element);
    CHECK(a.atoms[i].implicit_h == b.atoms[i].implicit_h);
    CHECK(a.atoms[i].aromatic == b.atoms[i].aromatic);
  }
  for (int i = 0; i < a.bond_count(); ++i) {
    CHECK(a.bonds[i].a == b.bonds[i].a);
    CHECK(a.bonds[i].b == b.bonds[i].b);
    CHECK(a.bonds[i].order == b.bonds[i].order);
  }
}

TEST_CASE("neutral carbon valence sums to 4") {
  for (const char* smi : {"CCCC", "CC(C)(C)C", "C1CCCCC1", "C=CC#C", "CC(=O)C",
                          "c1ccccc1", "Cc1ccccc1"}) {
    Molecule m = parse_smiles(smi);
    for (int i = 0; i < m.atom_count(); ++i) {
      const Atom& a = m.atoms[i];
      if (a.element != Element::C || a.formal_charge != 0) continue;
      double sum = a.implicit_h;
      bool has_aromatic = false;
      for (int bi : m.incident_bonds[i]) {
        switch (m.bonds[bi].order) {
          case BondOrder::Single: sum += 1; break;
          case BondOrder::Double: sum += 2; break;
          case BondOrder::Triple: sum += 3; break;
          case BondOrder::Aromatic:
            sum += 1.5;
            has_aromatic = true;
            break;
        }
      }
      // Aromatic carbons: 2 ring bonds at 1.5 plus remaining sigma = 4.
      if (has_aromatic)
        CHECK(sum == doctest::Approx(4.0));
      else
        CHECK(sum == 4.0);
    }
  }
}

TEST_CASE("distance matrix: spec values") {
  auto max_entry = [](const std::vector<std::vector<int>>& d) {
    int m = 0;
    for (const auto& row : d)
      for (int v : row) m = std::max(m, v);
    return m;
  };
  CHECK(max_entry(distance_matrix(parse_smiles("CCCC"))) == 3);
  CHECK(max_entry(distance_matrix(parse_smiles("c1ccccc1"))) == 3);

  // Frozen from the Floyd-Warshall oracle on the 4-vertex star: pairwise
  // sum 1+1+1+2+2+2 = 9.
  auto d = distance_matrix(parse_smiles("CC(C)C"));
  int sum = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) sum += d[i][j];
  CHECK(sum == 9);
}

TEST_CASE("distance matrix equals Floyd-Warshall oracle on random graphs") {
  StableRng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.bounded(14));
    const int extra = static_cast<int>(rng.bounded(4));
    Molecule m = testing::random_graph(rng, n, extra);
    CHECK(distance_matrix(m) == testing::floyd_warshall(m));
  }
}

TEST_CASE("distance matrix symmetry and zero diagonal") {
  Molecule m = parse_smiles("CC(C)Cc1ccc(cc1)C(C)C(=O)O");  // ibuprofen
  auto d = distance_matrix(m);
  for (int i = 0; i < m.atom_count(); ++i) {
    CHECK(d[i][i] == 0);
    for (int j = 0; j < m.atom_count(); ++j) CHECK(d[i][j] == d[j][i]);
  }
}

TEST_CASE("structure key invariant under atom reordering") {
  StableRng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng.bounded(10));
    Molecule m = testing::random_graph(rng, n, static_cast<int>(rng.bounded(3)), true);
    std::string s1 = testing::write_smiles(m, 0, rng);
    std::string s2 = testing::write_smiles(m, n - 1, rng);
    CHECK(structure_key(parse_smiles(s1)) == structure_key(parse_smiles(s2)));
  }
  CHECK(structure_key(parse_smiles("CCO")) == structure_key(parse_smiles("OCC")));
  CHECK(structure_key(parse_smiles("CCO")) != structure_key(parse_smiles("CCN")));
  CHECK(structure_key(parse_smiles("CCO")) != structure_key(parse_smiles("COC")));
}
