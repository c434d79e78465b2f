#include "autoqsar/fingerprints.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <set>

#include "autoqsar/errors.hpp"
#include "autoqsar/stable_hash.hpp"

namespace autoqsar {

namespace {

constexpr std::uint64_t kRadialSalt = 0x7261646961ULL;
constexpr std::uint64_t kPathSalt = 0x70617468ULL;
constexpr std::uint64_t kBranchSalt = 0x6272616e6368ULL;
constexpr std::uint64_t kMolprintSalt = 0x6d6f6c7032ULL;

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

std::uint64_t atom_invariant(const Atom& a) {
  return hash_u64_span(kRadialSalt, {static_cast<std::uint64_t>(a.element),
                                     static_cast<std::uint64_t>(a.degree),
                                     static_cast<std::uint64_t>(a.formal_charge + 16),
                                     static_cast<std::uint64_t>(a.implicit_h),
                                     static_cast<std::uint64_t>(a.aromatic ? 1 : 0)});
}

// Atoms within `radius` bonds of `center`, sorted.
std::vector<int> atoms_within(const Molecule& mol, int center, int radius) {
  std::vector<int> dist(mol.atom_count(), -1);
  std::deque<int> queue{center};
  dist[center] = 0;
  std::vector<int> result{center};
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (dist[u] == radius) continue;
    for (int v : mol.neighbors[u]) {
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      result.push_back(v);
      queue.push_back(v);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

void radial_features(const Molecule& mol, int radius, Fingerprint& fp) {
  const int n = mol.atom_count();
  std::vector<std::uint64_t> code(n);
  for (int i = 0; i < n; ++i) code[i] = atom_invariant(mol.atoms[i]);

  // Radius 0: every atom is its own environment.
  for (int i = 0; i < n; ++i) fp.features[code[i]] += 1;

  std::vector<std::uint64_t> next(n);
  for (int r = 1; r <= radius; ++r) {
    for (int i = 0; i < n; ++i) {
      std::vector<std::uint64_t> nbr_codes;
      nbr_codes.reserve(mol.neighbors[i].size());
      for (std::size_t k = 0; k < mol.neighbors[i].size(); ++k) {
        const Bond& b = mol.bonds[mol.incident_bonds[i][k]];
        nbr_codes.push_back(hash_combine(static_cast<std::uint64_t>(b.order),
                                         code[mol.neighbors[i][k]]));
      }
      std::sort(nbr_codes.begin(), nbr_codes.end());
      std::uint64_t h = hash_u64_span(kRadialSalt,
                                      {static_cast<std::uint64_t>(r), code[i]});
      for (std::uint64_t c : nbr_codes) h = hash_combine(h, c);
      next[i] = h;
    }
    code = next;
    // Identical (radius, atom-set) environments deduplicate to one feature;
    // the smallest code represents the group so the choice does not depend
    // on input atom order.
    std::map<std::vector<int>, std::uint64_t> groups;
    for (int i = 0; i < n; ++i) {
      std::vector<int> within = atoms_within(mol, i, r);
      auto [it, inserted] = groups.try_emplace(std::move(within), code[i]);
      if (!inserted) it->second = std::min(it->second, code[i]);
    }
    for (const auto& [atoms, key] : groups) {
      (void)atoms;
      fp.features[key] += 1;
    }
  }
}

// All simple paths of 0..max_bonds bonds; each unordered path contributes
// once, keyed by the lexicographically smaller directional symbol string.
void linear_features(const Molecule& mol, int max_bonds, Fingerprint& fp) {
  std::vector<int> path;
  std::string fwd;

  std::function<void(int)> extend = [&](int atom) {
    path.push_back(atom);
    if (path.size() == 1) {
      fp.features[hash_bytes(atom_token(mol.atoms[atom]), kPathSalt)] += 1;
    } else if (path.front() < path.back()) {
      fwd.clear();
      for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) fwd += bond_token(mol.bond_between(path[i - 1], path[i])->order);
        fwd += atom_token(mol.atoms[path[i]]);
      }
      std::string bwd;
      for (std::size_t i = path.size(); i-- > 0;) {
        if (i + 1 < path.size())
          bwd += bond_token(mol.bond_between(path[i], path[i + 1])->order);
        bwd += atom_token(mol.atoms[path[i]]);
      }
      fp.features[hash_bytes(std::min(fwd, bwd), kPathSalt)] += 1;
    }
    if (static_cast<int>(path.size()) <= max_bonds) {
      for (int nbr : mol.neighbors[atom])
        if (std::find(path.begin(), path.end(), nbr) == path.end()) extend(nbr);
    }
    path.pop_back();
  };
  for (int a = 0; a < mol.atom_count(); ++a) extend(a);
}

// Rooted directional path strings of 1..3 bonds starting at `root`, with
// the first-step neighbor recorded for branch pairing.
struct RootedPath {
  int first_neighbor;
  std::string symbols;  // starts at the root token
};

std::vector<RootedPath> rooted_paths(const Molecule& mol, int root, int max_bonds) {
  std::vector<RootedPath> out;
  std::vector<int> path{root};
  std::function<void()> extend = [&]() {
    const int tip = path.back();
    for (int nbr : mol.neighbors[tip]) {
      if (std::find(path.begin(), path.end(), nbr) != path.end()) continue;
      path.push_back(nbr);
      std::string s;
      for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) s += bond_token(mol.bond_between(path[i - 1], path[i])->order);
        s += atom_token(mol.atoms[path[i]]);
      }
      out.push_back(RootedPath{path[1], std::move(s)});
      if (static_cast<int>(path.size()) <= max_bonds) extend();
      path.pop_back();
    }
  };
  extend();
  return out;
}

// Linear features plus, at every branching atom, hashed unordered pairs of
// rooted paths that leave through different first bonds.
void dendritic_features(const Molecule& mol, int max_bonds, Fingerprint& fp) {
  linear_features(mol, max_bonds, fp);
  for (int i = 0; i < mol.atom_count(); ++i) {
    if (mol.atoms[i].degree < 3) continue;
    auto paths = rooted_paths(mol, i, 3);
    for (std::size_t a = 0; a < paths.size(); ++a) {
      for (std::size_t b = a + 1; b < paths.size(); ++b) {
        if (paths[a].first_neighbor == paths[b].first_neighbor) continue;
        const std::string& lo = std::min(paths[a].symbols, paths[b].symbols);
        const std::string& hi = std::max(paths[a].symbols, paths[b].symbols);
        fp.features[hash_bytes(lo + "|" + hi, kBranchSalt)] += 1;
      }
    }
  }
}

// Per-atom sorted multiset of (distance <= max_dist, atom type) pairs.
void molprint_features(const Molecule& mol, int max_dist, Fingerprint& fp) {
  const auto dist = distance_matrix(mol);
  for (int i = 0; i < mol.atom_count(); ++i) {
    std::vector<std::string> shell;
    for (int j = 0; j < mol.atom_count(); ++j) {
      if (j == i || dist[i][j] > max_dist) continue;
      shell.push_back(std::to_string(dist[i][j]) + ":" + atom_token(mol.atoms[j]));
    }
    std::sort(shell.begin(), shell.end());
    std::string env = atom_token(mol.atoms[i]) + "|";
    for (const std::string& s : shell) env += s + ";";
    fp.features[hash_bytes(env, kMolprintSalt)] += 1;
  }
}

}  // namespace

const char* scheme_name(FingerprintScheme s) {
  switch (s) {
    case FingerprintScheme::Radial: return "radial";
    case FingerprintScheme::Linear: return "linear";
    case FingerprintScheme::Dendritic: return "dendritic";
    case FingerprintScheme::Molprint2D: return "molprint2d";
  }
  return "?";
}

FingerprintScheme scheme_from_name(const std::string& name) {
  if (name == "radial") return FingerprintScheme::Radial;
  if (name == "linear") return FingerprintScheme::Linear;
  if (name == "dendritic") return FingerprintScheme::Dendritic;
  if (name == "molprint2d") return FingerprintScheme::Molprint2D;
  throw ConfigError("unknown fingerprint scheme: " + name);
}

int default_fingerprint_param(FingerprintScheme s) {
  switch (s) {
    case FingerprintScheme::Radial: return 3;
    case FingerprintScheme::Linear: return 7;
    case FingerprintScheme::Dendritic: return 7;
    case FingerprintScheme::Molprint2D: return 2;
  }
  return 0;
}

Fingerprint fingerprint(const Molecule& mol, FingerprintScheme scheme, int param) {
  Fingerprint fp;
  fp.scheme = scheme;
  fp.param = param;
  switch (scheme) {
    case FingerprintScheme::Radial:
      if (param < 0 || param > 3)
        throw ConfigError("radial radius must be in [0,3]");
      radial_features(mol, param, fp);
      break;
    case FingerprintScheme::Linear:
      if (param < 1 || param > 7)
        throw ConfigError("linear path length must be in [1,7]");
      linear_features(mol, param, fp);
      break;
    case FingerprintScheme::Dendritic:
      if (param < 1 || param > 7)
        throw ConfigError("dendritic path length must be in [1,7]");
      dendritic_features(mol, param, fp);
      break;
    case FingerprintScheme::Molprint2D:
      if (param < 0 || param > 3)
        throw ConfigError("molprint2d distance must be in [0,3]");
      molprint_features(mol, param, fp);
      break;
  }
  return fp;
}

Fingerprint fingerprint(const Molecule& mol, FingerprintScheme scheme) {
  return fingerprint(mol, scheme, default_fingerprint_param(scheme));
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.scheme != b.scheme || a.param != b.param)
    throw ConfigError("tanimoto requires matching fingerprint scheme and params");
  if (a.features.empty() && b.features.empty()) return 0.0;
  std::uint64_t min_sum = 0, max_sum = 0;
  auto ia = a.features.begin();
  auto ib = b.features.begin();
  while (ia != a.features.end() || ib != b.features.end()) {
    if (ib == b.features.end() || (ia != a.features.end() && ia->first < ib->first)) {
      max_sum += ia->second;
      ++ia;
    } else if (ia == a.features.end() || ib->first < ia->first) {
      max_sum += ib->second;
      ++ib;
    } else {
      min_sum += std::min(ia->second, ib->second);
      max_sum += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return max_sum == 0 ? 0.0 : static_cast<double>(min_sum) / static_cast<double>(max_sum);
}

std::vector<std::uint8_t> fold_binary(const Fingerprint& fp, int bits) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(bits), 0);
  for (const auto& [key, count] : fp.features) {
    (void)count;
    out[static_cast<std::size_t>(key % static_cast<std::uint64_t>(bits))] = 1;
  }
  return out;
}

}  // namespace autoqsar
