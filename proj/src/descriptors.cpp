#include "autoqsar/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "autoqsar/atom_contrib_v1.hpp"
#include "autoqsar/errors.hpp"

namespace autoqsar {

namespace {

bool is_halogen(Element e) {
  return e == Element::F || e == Element::Cl || e == Element::Br || e == Element::I;
}

// Order-independent float accumulation so descriptor values are bitwise
// invariant under atom reordering of the input.
double stable_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

bool ring_is_aromatic(const Molecule& mol, const std::vector<int>& ring) {
  for (int a : ring)
    if (!mol.atoms[a].aromatic) return false;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Bond* b = mol.bond_between(ring[i], ring[(i + 1) % ring.size()]);
    if (!b || b->order != BondOrder::Aromatic) return false;
  }
  return true;
}

// Simple paths with exactly `length` bonds, each unordered path once.
long count_paths(const Molecule& mol, int length) {
  long count = 0;
  std::vector<int> path;
  std::function<void(int)> extend = [&](int atom) {
    path.push_back(atom);
    if (static_cast<int>(path.size()) == length + 1) {
      if (path.front() < path.back()) ++count;  // each path from one end only
    } else {
      for (int nbr : mol.neighbors[atom])
        if (std::find(path.begin(), path.end(), nbr) == path.end()) extend(nbr);
    }
    path.pop_back();
  };
  for (int a = 0; a < mol.atom_count(); ++a) extend(a);
  return count;
}

bool bond_in_ring(const Molecule& mol, int bond_index) {
  const Bond& b = mol.bonds[bond_index];
  for (const auto& ring : mol.rings) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      int u = ring[i], v = ring[(i + 1) % ring.size()];
      if ((u == b.a && v == b.b) || (u == b.b && v == b.a)) return true;
    }
  }
  return false;
}

double logp_contribution(const Atom& a) {
  using namespace atom_contrib_v1;
  const int el = static_cast<int>(a.element);
  const bool has_h = a.implicit_h > 0;
  double best = 0.0;
  bool found = false;
  for (const LogPEntry& e : kLogP) {
    if (e.element != el) continue;
    if (!found) {
      best = e.value;  // element fallback when no class matches exactly
      found = true;
    }
    if (e.aromatic == a.aromatic && e.has_h == has_h) {
      best = e.value;
      break;
    }
  }
  return best + kLogPChargePenalty * std::abs(a.formal_charge);
}

double psa_contribution(const Molecule& mol, int atom_index) {
  using namespace atom_contrib_v1;
  const Atom& a = mol.atoms[atom_index];
  if (a.element != Element::N && a.element != Element::O) return 0.0;
  const int el = static_cast<int>(a.element);
  const int h_class = std::min(a.implicit_h, 2);
  bool double_bonded = false;
  for (int bi : mol.incident_bonds[atom_index])
    if (mol.bonds[bi].order == BondOrder::Double) double_bonded = true;
  for (const PsaEntry& e : kPolarSurface) {
    if (e.element == el && e.aromatic == a.aromatic && e.h_class == h_class &&
        e.double_bonded == double_bonded) {
      return e.value + kPsaChargeBump * std::abs(a.formal_charge);
    }
  }
  return 0.0;
}

}  // namespace

DescriptorCatalog::DescriptorCatalog() {
  version_ = std::string("aqd1/") + atom_contrib_v1::kVersion;
  entries_ = {
      {"mol_weight", "sum of standard atomic weights incl. implicit H", "Da"},
      {"heavy_atoms", "non-hydrogen atom count", "count"},
      {"carbon_count", "C atoms", "count"},
      {"nitrogen_count", "N atoms", "count"},
      {"oxygen_count", "O atoms", "count"},
      {"sulfur_count", "S atoms", "count"},
      {"halogen_count", "F+Cl+Br+I atoms", "count"},
      {"ring_count", "SSSR ring count", "count"},
      {"aromatic_ring_count", "SSSR rings with all atoms and bonds aromatic", "count"},
      {"hbd", "hydrogens on N or O (donor H count)", "count"},
      {"hba", "N plus O atoms (acceptor count)", "count"},
      {"rotatable_bonds", "non-ring single bonds between non-terminal heavy atoms", "count"},
      {"wiener_index", "sum of topological distances over unordered atom pairs", "dimensionless"},
      {"zagreb_m1", "sum of squared heavy-atom degrees", "dimensionless"},
      {"zagreb_m2", "sum over bonds of degree products", "dimensionless"},
      {"balaban_j", "m/(mu+1) * sum over bonds 1/sqrt(S_u*S_v); 0 for single atom", "dimensionless"},
      {"chi0", "sum over atoms of deg^-1/2 (zero-degree atoms contribute 0)", "dimensionless"},
      {"chi1", "sum over bonds of (deg_u*deg_v)^-1/2", "dimensionless"},
      {"kappa1", "A(A-1)^2/P1^2, 0 when P1=0", "dimensionless"},
      {"kappa2", "(A-1)(A-2)^2/P2^2, 0 when P2=0", "dimensionless"},
      {"kappa3", "parity form of Kier kappa-3 on P3, 0 when P3=0", "dimensionless"},
      {"graph_radius", "minimum atom eccentricity", "bonds"},
      {"graph_diameter", "maximum atom eccentricity", "bonds"},
      {"eccentric_connectivity", "sum of eccentricity*degree over atoms", "dimensionless"},
      {"logp_est", "atom-contribution logP estimate (table acv1)", "log units"},
      {"tpsa_est", "atom-contribution polar surface area estimate (table acv1)", "A^2"},
  };
}

const DescriptorCatalog& DescriptorCatalog::instance() {
  static DescriptorCatalog catalog;
  return catalog;
}

int DescriptorCatalog::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].name == name) return static_cast<int>(i);
  return -1;
}

std::string DescriptorCatalog::to_csv() const {
  std::ostringstream os;
  os << "name,definition,units\n";
  for (const CatalogEntry& e : entries_)
    os << e.name << ",\"" << e.definition << "\"," << e.units << "\n";
  os << "# catalog_version," << version_ << ",\n";
  return os.str();
}

DescriptorVector compute_descriptors(const Molecule& mol, const std::string& source_id) {
  const int n = mol.atom_count();
  const int m = mol.bond_count();

  double mw = 0.0;
  int heavy = 0, c_count = 0, n_count = 0, o_count = 0, s_count = 0, hal_count = 0;
  int hbd = 0, hba = 0;
  for (const Atom& a : mol.atoms) {
    mw += element_mass(a.element) + a.implicit_h * element_mass(Element::H);
    if (a.element != Element::H) ++heavy;
    switch (a.element) {
      case Element::C: ++c_count; break;
      case Element::N: ++n_count; break;
      case Element::O: ++o_count; break;
      case Element::S: ++s_count; break;
      default: break;
    }
    if (is_halogen(a.element)) ++hal_count;
    if (a.element == Element::N || a.element == Element::O) {
      ++hba;
      hbd += a.implicit_h;
    }
  }

  int aromatic_rings = 0;
  for (const auto& ring : mol.rings)
    if (ring_is_aromatic(mol, ring)) ++aromatic_rings;

  int rotatable = 0;
  for (int bi = 0; bi < m; ++bi) {
    const Bond& b = mol.bonds[bi];
    if (b.order != BondOrder::Single) continue;
    if (mol.atoms[b.a].degree < 2 || mol.atoms[b.b].degree < 2) continue;
    if (bond_in_ring(mol, bi)) continue;
    ++rotatable;
  }

  const auto dist = distance_matrix(mol);
  long wiener = 0;
  std::vector<long> row_sum(n, 0);
  std::vector<int> eccentricity(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      row_sum[i] += dist[i][j];
      eccentricity[i] = std::max(eccentricity[i], dist[i][j]);
      if (j > i) wiener += dist[i][j];
    }
  }

  double zagreb1 = 0.0, zagreb2 = 0.0;
  std::vector<double> chi0_terms, chi1_terms;
  for (const Atom& a : mol.atoms) {
    zagreb1 += static_cast<double>(a.degree) * a.degree;
    if (a.degree > 0) chi0_terms.push_back(1.0 / std::sqrt(static_cast<double>(a.degree)));
  }
  for (const Bond& b : mol.bonds) {
    const int du = mol.atoms[b.a].degree, dv = mol.atoms[b.b].degree;
    zagreb2 += static_cast<double>(du) * dv;
    if (du > 0 && dv > 0)
      chi1_terms.push_back(1.0 / std::sqrt(static_cast<double>(du) * dv));
  }
  const double chi0 = stable_sum(std::move(chi0_terms));
  const double chi1 = stable_sum(std::move(chi1_terms));

  double balaban = 0.0;
  if (m > 0) {
    const int mu = m - n + 1;
    std::vector<double> terms;
    terms.reserve(m);
    for (const Bond& b : mol.bonds)
      terms.push_back(1.0 / std::sqrt(static_cast<double>(row_sum[b.a]) * row_sum[b.b]));
    balaban = static_cast<double>(m) / (mu + 1.0) * stable_sum(std::move(terms));
  }

  const double A = n;
  const long p1 = m;
  const long p2 = count_paths(mol, 2);
  const long p3 = count_paths(mol, 3);
  const double kappa1 = p1 > 0 ? A * (A - 1) * (A - 1) / (static_cast<double>(p1) * p1) : 0.0;
  const double kappa2 = p2 > 0 ? (A - 1) * (A - 2) * (A - 2) / (static_cast<double>(p2) * p2) : 0.0;
  double kappa3 = 0.0;
  if (p3 > 0) {
    kappa3 = (n % 2 == 0) ? (A - 1) * (A - 3) * (A - 3) / (static_cast<double>(p3) * p3)
                          : (A - 3) * (A - 2) * (A - 2) / (static_cast<double>(p3) * p3);
  }

  int radius = n > 0 ? *std::min_element(eccentricity.begin(), eccentricity.end()) : 0;
  int diameter = n > 0 ? *std::max_element(eccentricity.begin(), eccentricity.end()) : 0;
  double ecc_connectivity = 0.0;
  for (int i = 0; i < n; ++i)
    ecc_connectivity += static_cast<double>(eccentricity[i]) * mol.atoms[i].degree;

  std::vector<double> logp_terms, tpsa_terms;
  for (int i = 0; i < n; ++i) {
    logp_terms.push_back(logp_contribution(mol.atoms[i]));
    tpsa_terms.push_back(psa_contribution(mol, i));
  }
  const double logp = stable_sum(std::move(logp_terms));
  const double tpsa = stable_sum(std::move(tpsa_terms));

  DescriptorVector out;
  out.source_id = source_id;
  out.values = {mw,
                static_cast<double>(heavy),
                static_cast<double>(c_count),
                static_cast<double>(n_count),
                static_cast<double>(o_count),
                static_cast<double>(s_count),
                static_cast<double>(hal_count),
                static_cast<double>(mol.rings.size()),
                static_cast<double>(aromatic_rings),
                static_cast<double>(hbd),
                static_cast<double>(hba),
                static_cast<double>(rotatable),
                static_cast<double>(wiener),
                zagreb1,
                zagreb2,
                balaban,
                chi0,
                chi1,
                kappa1,
                kappa2,
                kappa3,
                static_cast<double>(radius),
                static_cast<double>(diameter),
                ecc_connectivity,
                logp,
                tpsa};
  return out;
}

std::vector<int> correlation_filter(const Eigen::MatrixXd& matrix, double max_r) {
  if (max_r <= 0.0 || max_r > 1.0)
    throw ConfigError("max pair correlation must be in (0,1]");
  if (matrix.rows() < 3)
    throw DataError("correlation filter needs at least 3 rows");

  const Eigen::Index cols = matrix.cols();
  Eigen::MatrixXd centered = matrix.rowwise() - matrix.colwise().mean();
  Eigen::VectorXd norms(cols);
  for (Eigen::Index j = 0; j < cols; ++j) norms(j) = centered.col(j).norm();

  std::vector<int> retained;
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (norms(j) == 0.0) continue;  // constant column
    bool keep = true;
    for (int k : retained) {
      const double r = centered.col(j).dot(centered.col(k)) / (norms(j) * norms(k));
      if (std::abs(r) > max_r) {
        keep = false;
        break;
      }
    }
    if (keep) retained.push_back(static_cast<int>(j));
  }
  if (retained.empty())
    throw DataError("all descriptor columns are constant");
  return retained;
}

}  // namespace autoqsar
