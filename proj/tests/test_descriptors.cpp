#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "autoqsar/descriptors.hpp"
#include "autoqsar/errors.hpp"
#include "autoqsar/molgraph.hpp"
#include "support/molgen.hpp"
#include "support/oracles.hpp"

using namespace autoqsar;

namespace {

double value_of(const DescriptorVector& v, const std::string& name) {
  const int idx = DescriptorCatalog::instance().index_of(name);
  REQUIRE(idx >= 0);
  return v.values[static_cast<std::size_t>(idx)];
}

// Brute-force path counts from the adjacency matrix, independent of the
// production DFS enumeration.
long brute_force_paths(const Molecule& mol, int length) {
  const int n = mol.atom_count();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const Bond& b : mol.bonds) adj[b.a][b.b] = adj[b.b][b.a] = true;
  long ordered = 0;
  if (length == 2) {
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w) {
          if (u == v || v == w || u == w) continue;
          if (adj[u][v] && adj[v][w]) ++ordered;
        }
  } else if (length == 3) {
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
          for (int x = 0; x < n; ++x) {
            if (u == v || u == w || u == x || v == w || v == x || w == x) continue;
            if (adj[u][v] && adj[v][w] && adj[w][x]) ++ordered;
          }
  }
  return ordered / 2;
}

}  // namespace

TEST_CASE("methane molecular weight") {
  auto v = compute_descriptors(parse_smiles("C"));
  CHECK(value_of(v, "mol_weight") == doctest::Approx(16.043).epsilon(1e-4));
}

TEST_CASE("butane Wiener index matches the all-pairs oracle") {
  Molecule m = parse_smiles("CCCC");
  auto fw = testing::floyd_warshall(m);
  long oracle = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) oracle += fw[i][j];
  CHECK(oracle == 10);
  CHECK(value_of(compute_descriptors(m), "wiener_index") == 10.0);
}

TEST_CASE("benzene Zagreb M1 from brute-force degrees") {
  Molecule m = parse_smiles("c1ccccc1");
  double oracle = 0;
  for (const Atom& a : m.atoms) oracle += a.degree * a.degree;
  CHECK(oracle == 24.0);
  CHECK(value_of(compute_descriptors(m), "zagreb_m1") == 24.0);
}

TEST_CASE("simple counts") {
  auto v = compute_descriptors(parse_smiles("CC(=O)Oc1ccccc1C(=O)O"));  // aspirin
  CHECK(value_of(v, "heavy_atoms") == 13.0);
  CHECK(value_of(v, "carbon_count") == 9.0);
  CHECK(value_of(v, "oxygen_count") == 4.0);
  CHECK(value_of(v, "ring_count") == 1.0);
  CHECK(value_of(v, "aromatic_ring_count") == 1.0);
  CHECK(value_of(v, "hbd") == 1.0);
  CHECK(value_of(v, "hba") == 4.0);
  CHECK(value_of(v, "mol_weight") == doctest::Approx(180.157).epsilon(1e-3));
}

TEST_CASE("rotatable bonds") {
  CHECK(value_of(compute_descriptors(parse_smiles("CCCC")), "rotatable_bonds") == 1.0);
  CHECK(value_of(compute_descriptors(parse_smiles("CC")), "rotatable_bonds") == 0.0);
  CHECK(value_of(compute_descriptors(parse_smiles("C1CCCCC1")), "rotatable_bonds") == 0.0);
  CHECK(value_of(compute_descriptors(parse_smiles("c1ccccc1Cc1ccccc1")),
                 "rotatable_bonds") == 2.0);
}

TEST_CASE("single-atom degenerate conventions") {
  auto v = compute_descriptors(parse_smiles("C"));
  CHECK(value_of(v, "wiener_index") == 0.0);
  CHECK(value_of(v, "balaban_j") == 0.0);
  CHECK(value_of(v, "chi0") == 0.0);
  CHECK(value_of(v, "chi1") == 0.0);
  CHECK(value_of(v, "kappa1") == 0.0);
  CHECK(value_of(v, "kappa2") == 0.0);
  CHECK(value_of(v, "kappa3") == 0.0);
  CHECK(value_of(v, "graph_radius") == 0.0);
  CHECK(value_of(v, "graph_diameter") == 0.0);
  for (double x : v.values) CHECK(std::isfinite(x));
}

TEST_CASE("topological descriptors match Floyd-Warshall oracle on random molecules") {
  StableRng rng(4242);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.bounded(12));
    Molecule m = testing::random_graph(rng, n, static_cast<int>(rng.bounded(3)), true);
    auto fw = testing::floyd_warshall(m);

    long wiener = 0;
    std::vector<int> ecc(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        ecc[i] = std::max(ecc[i], fw[i][j]);
        if (j > i) wiener += fw[i][j];
      }
    int radius = *std::min_element(ecc.begin(), ecc.end());
    int diameter = *std::max_element(ecc.begin(), ecc.end());
    double eci = 0;
    for (int i = 0; i < n; ++i) eci += static_cast<double>(ecc[i]) * m.atoms[i].degree;

    auto v = compute_descriptors(m);
    CHECK(value_of(v, "wiener_index") == static_cast<double>(wiener));
    CHECK(value_of(v, "graph_radius") == static_cast<double>(radius));
    CHECK(value_of(v, "graph_diameter") == static_cast<double>(diameter));
    CHECK(value_of(v, "eccentric_connectivity") == eci);
  }
}

TEST_CASE("Zagreb, Randic and kappa agree with brute-force formulas") {
  StableRng rng(515);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + static_cast<int>(rng.bounded(8));
    Molecule m = testing::random_graph(rng, n, static_cast<int>(rng.bounded(2)));
    auto v = compute_descriptors(m);

    double m1 = 0, chi0 = 0;
    for (const Atom& a : m.atoms) {
      m1 += static_cast<double>(a.degree) * a.degree;
      if (a.degree > 0) chi0 += 1.0 / std::sqrt(static_cast<double>(a.degree));
    }
    double m2 = 0, chi1 = 0;
    for (const Bond& b : m.bonds) {
      m2 += static_cast<double>(m.atoms[b.a].degree) * m.atoms[b.b].degree;
      chi1 += 1.0 / std::sqrt(static_cast<double>(m.atoms[b.a].degree) *
                              m.atoms[b.b].degree);
    }
    const double A = n;
    const long p1 = m.bond_count();
    const long p2 = brute_force_paths(m, 2);
    const long p3 = brute_force_paths(m, 3);
    const double k1 = p1 ? A * (A - 1) * (A - 1) / static_cast<double>(p1 * p1) : 0.0;
    const double k2 = p2 ? (A - 1) * (A - 2) * (A - 2) / static_cast<double>(p2 * p2) : 0.0;
    double k3 = 0.0;
    if (p3)
      k3 = (n % 2 == 0)
               ? (A - 1) * (A - 3) * (A - 3) / static_cast<double>(p3 * p3)
               : (A - 3) * (A - 2) * (A - 2) / static_cast<double>(p3 * p3);

    CHECK(value_of(v, "zagreb_m1") == doctest::Approx(m1).epsilon(1e-9));
    CHECK(value_of(v, "zagreb_m2") == doctest::Approx(m2).epsilon(1e-9));
    CHECK(value_of(v, "chi0") == doctest::Approx(chi0).epsilon(1e-9));
    CHECK(value_of(v, "chi1") == doctest::Approx(chi1).epsilon(1e-9));
    CHECK(value_of(v, "kappa1") == doctest::Approx(k1).epsilon(1e-9));
    CHECK(value_of(v, "kappa2") == doctest::Approx(k2).epsilon(1e-9));
    CHECK(value_of(v, "kappa3") == doctest::Approx(k3).epsilon(1e-9));
  }
}

TEST_CASE("descriptor vector invariant under atom reordering") {
  CHECK(compute_descriptors(parse_smiles("CCO")).values ==
        compute_descriptors(parse_smiles("OCC")).values);
  StableRng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + static_cast<int>(rng.bounded(9));
    Molecule m = testing::random_graph(rng, n, static_cast<int>(rng.bounded(3)), true);
    auto a = compute_descriptors(parse_smiles(testing::write_smiles(m, 0, rng)));
    auto b =
        compute_descriptors(parse_smiles(testing::write_smiles(m, n - 1, rng)));
    for (std::size_t i = 0; i < a.values.size(); ++i)
      CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("catalog shape") {
  const auto& cat = DescriptorCatalog::instance();
  CHECK(cat.size() == compute_descriptors(parse_smiles("C")).values.size());
  std::set<std::string> names;
  for (const auto& e : cat.entries()) names.insert(e.name);
  CHECK(names.size() == cat.size());  // unique
  CHECK(cat.to_csv().find("mol_weight") != std::string::npos);
  CHECK(cat.to_csv().find(cat.version()) != std::string::npos);
}

TEST_CASE("correlation filter: duplicate, constant and anticorrelated columns") {
  Eigen::MatrixXd m(5, 4);
  // col0: signal; col1: identical copy; col2: constant; col3: -signal
  for (int i = 0; i < 5; ++i) {
    m(i, 0) = i + 1;
    m(i, 1) = i + 1;
    m(i, 2) = 7.0;
    m(i, 3) = -(i + 1);
  }
  auto kept = correlation_filter(m, 0.99);
  CHECK(kept == std::vector<int>{0});
}

TEST_CASE("correlation filter keeps weakly correlated columns") {
  StableRng rng(7);
  Eigen::MatrixXd m(40, 6);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = rng.normal();
  auto kept = correlation_filter(m, 0.99);
  CHECK(kept.size() == 6);

  // Exhaustive pair scan: no retained pair above the threshold.
  for (std::size_t a = 0; a < kept.size(); ++a)
    for (std::size_t b = a + 1; b < kept.size(); ++b) {
      std::vector<double> x, y;
      for (int i = 0; i < 40; ++i) {
        x.push_back(m(i, kept[a]));
        y.push_back(m(i, kept[b]));
      }
      CHECK(std::abs(testing::pearson(x, y)) <= 0.99);
    }
}

TEST_CASE("correlation filter error paths") {
  Eigen::MatrixXd constant = Eigen::MatrixXd::Ones(5, 3);
  CHECK_THROWS_AS(correlation_filter(constant, 0.99), DataError);
  Eigen::MatrixXd tiny(2, 2);
  tiny << 1, 2, 3, 4;
  CHECK_THROWS_AS(correlation_filter(tiny, 0.99), DataError);
  Eigen::MatrixXd ok = Eigen::MatrixXd::Random(5, 2);
  CHECK_THROWS_AS(correlation_filter(ok, 0.0), ConfigError);
  CHECK_THROWS_AS(correlation_filter(ok, 1.5), ConfigError);
}

TEST_CASE("filter applied across descriptor matrix of real molecules") {
  std::vector<std::string> smiles = {"CCO",      "CCCO",   "CCCCO", "CC(C)O",
                                     "CCN",      "CCCN",   "CCCC",  "CCCCC",
                                     "c1ccccc1", "Cc1ccccc1"};
  const auto& cat = DescriptorCatalog::instance();
  Eigen::MatrixXd m(smiles.size(), cat.size());
  for (std::size_t i = 0; i < smiles.size(); ++i) {
    auto v = compute_descriptors(parse_smiles(smiles[i]));
    for (std::size_t j = 0; j < v.values.size(); ++j) m(i, j) = v.values[j];
  }
  auto kept = correlation_filter(m, 0.99);
  CHECK(!kept.empty());
  CHECK(kept.size() <= cat.size());
  for (std::size_t a = 0; a < kept.size(); ++a)
    for (std::size_t b = a + 1; b < kept.size(); ++b) {
      std::vector<double> x, y;
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        x.push_back(m(i, kept[a]));
        y.push_back(m(i, kept[b]));
      }
      CHECK(std::abs(testing::pearson(x, y)) <= 0.99 + 1e-12);
    }
}
