#include "support/oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace autoqsar::testing {

std::vector<std::vector<int>> floyd_warshall(const Molecule& mol) {
  const int n = mol.atom_count();
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const Bond& b : mol.bonds) {
    d[b.a][b.b] = 1;
    d[b.b][b.a] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

namespace {

std::string atom_token(const Atom& a) {
  std::string t = element_symbol(a.element);
  if (a.aromatic)
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (a.formal_charge > 0) t += "+" + std::to_string(a.formal_charge);
  if (a.formal_charge < 0) t += std::to_string(a.formal_charge);
  return t;
}

char bond_token(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return '-';
    case BondOrder::Double: return '=';
    case BondOrder::Triple: return '#';
    case BondOrder::Aromatic: return ':';
  }
  return '-';
}

std::string path_string(const Molecule& mol, const std::vector<int>& path) {
  std::string s = atom_token(mol.atoms[path[0]]);
  for (std::size_t i = 1; i < path.size(); ++i) {
    s += bond_token(mol.bond_between(path[i - 1], path[i])->order);
    s += atom_token(mol.atoms[path[i]]);
  }
  return s;
}

}  // namespace

std::map<std::string, int> enumerate_paths(const Molecule& mol, int max_bonds) {
  std::map<std::string, int> counts;
  std::set<std::vector<int>> seen;  // canonical (smaller of fwd/rev) index paths
  std::vector<int> path;
  std::function<void(int)> extend = [&](int atom) {
    path.push_back(atom);
    std::vector<int> rev(path.rbegin(), path.rend());
    const std::vector<int>& canon = path <= rev ? path : rev;
    if (seen.insert(canon).second) {
      std::string fwd = path_string(mol, path);
      std::string bwd = path_string(mol, rev);
      counts[std::min(fwd, bwd)] += 1;
    }
    if (static_cast<int>(path.size()) <= max_bonds) {
      for (int nbr : mol.neighbors[atom]) {
        if (std::find(path.begin(), path.end(), nbr) == path.end()) extend(nbr);
      }
    }
    path.pop_back();
  };
  for (int a = 0; a < mol.atom_count(); ++a) extend(a);
  return counts;
}

int count_radial_environments(const Molecule& mol, int max_radius) {
  const auto dist = floyd_warshall(mol);
  std::set<std::pair<int, std::vector<int>>> seen;
  int kept = 0;
  for (int r = 0; r <= max_radius; ++r) {
    for (int i = 0; i < mol.atom_count(); ++i) {
      std::vector<int> within;
      for (int j = 0; j < mol.atom_count(); ++j)
        if (dist[i][j] <= r) within.push_back(j);
      if (r == 0) {
        ++kept;  // every single-atom set is distinct
      } else if (seen.insert({r, within}).second) {
        ++kept;
      }
    }
  }
  return kept;
}

std::map<std::string, int> enumerate_molprint_environments(const Molecule& mol) {
  const auto dist = floyd_warshall(mol);
  std::map<std::string, int> counts;
  for (int i = 0; i < mol.atom_count(); ++i) {
    std::vector<std::string> shell;
    for (int j = 0; j < mol.atom_count(); ++j) {
      if (j == i || dist[i][j] > 2) continue;
      shell.push_back(std::to_string(dist[i][j]) + ":" + atom_token(mol.atoms[j]));
    }
    std::sort(shell.begin(), shell.end());
    std::ostringstream os;
    os << atom_token(mol.atoms[i]) << "|";
    for (const auto& s : shell) os << s << ";";
    counts[os.str()] += 1;
  }
  return counts;
}

Eigen::VectorXd least_squares_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::MatrixXd design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  return (design.transpose() * design).ldlt().solve(design.transpose() * y);
}

Eigen::VectorXd least_squares_predict(const Eigen::MatrixXd& x,
                                      const Eigen::VectorXd& beta) {
  return Eigen::VectorXd::Constant(x.rows(), beta(0)) + x * beta.tail(beta.size() - 1);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double num = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0 || vb == 0) return 0.0;
  return num / std::sqrt(va * vb);
}

}  // namespace autoqsar::testing
