#include "autoqsar/molgraph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <deque>
#include <map>
#include <numeric>
#include <optional>

#include "autoqsar/errors.hpp"
#include "autoqsar/stable_hash.hpp"

namespace autoqsar {

namespace {

struct ElementInfo {
  const char* symbol;
  double mass;
  bool organic_subset;
  std::array<int, 3> valences;  // ascending, 0-terminated
};

// Standard atomic weights, 3 decimals.
constexpr ElementInfo kElements[] = {
    {"B", 10.811, true, {3, 0, 0}},   {"C", 12.011, true, {4, 0, 0}},
    {"N", 14.007, true, {3, 5, 0}},   {"O", 15.999, true, {2, 0, 0}},
    {"P", 30.974, true, {3, 5, 0}},   {"S", 32.065, true, {2, 4, 6}},
    {"F", 18.998, true, {1, 0, 0}},   {"Cl", 35.453, true, {1, 0, 0}},
    {"Br", 79.904, true, {1, 0, 0}},  {"I", 126.904, true, {1, 0, 0}},
    {"H", 1.008, false, {1, 0, 0}},
};

const ElementInfo& info(Element e) { return kElements[static_cast<int>(e)]; }

std::optional<Element> element_from_symbol(const std::string& sym) {
  for (int i = 0; i < static_cast<int>(std::size(kElements)); ++i) {
    if (sym == kElements[i].symbol) return static_cast<Element>(i);
  }
  return std::nullopt;
}

int bond_order_units(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 1;
    case BondOrder::Double: return 2;
    case BondOrder::Triple: return 3;
    case BondOrder::Aromatic: return 1;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Parser

struct ParsedAtom {
  Atom atom;
  std::size_t position = 0;
  bool bracket = false;
  int bracket_h = 0;
};

struct RingOpening {
  int atom = -1;
  std::optional<BondOrder> order;
  std::size_t position = 0;
};

class SmilesParser {
 public:
  explicit SmilesParser(const std::string& text) : text_(text) {}

  void run() {
    if (text_.empty()) throw SmilesError("empty SMILES", 0);
    while (pos_ < text_.size()) step();
    if (pending_bond_) throw SmilesError("dangling bond symbol", pending_bond_pos_);
    if (!branch_stack_.empty())
      throw SmilesError("unclosed branch", branch_stack_.back().second);
    if (!ring_openings_.empty())
      throw SmilesError("unclosed ring bond", ring_openings_.begin()->second.position);
    if (atoms_.empty()) throw SmilesError("no atoms", 0);
  }

  std::vector<ParsedAtom>& atoms() { return atoms_; }
  std::vector<Bond>& bonds() { return bonds_; }

 private:
  void step() {
    const char c = text_[pos_];
    if (c == '(') {
      if (pending_bond_) throw SmilesError("bond symbol before branch open", pos_);
      if (prev_ < 0) throw SmilesError("branch with no preceding atom", pos_);
      branch_stack_.emplace_back(prev_, pos_);
      ++pos_;
    } else if (c == ')') {
      if (branch_stack_.empty()) throw SmilesError("unmatched ')'", pos_);
      if (pending_bond_) throw SmilesError("dangling bond symbol", pending_bond_pos_);
      prev_ = branch_stack_.back().first;
      branch_stack_.pop_back();
      ++pos_;
    } else if (c == '.') {
      if (pending_bond_) throw SmilesError("bond symbol before '.'", pos_);
      if (!branch_stack_.empty()) throw SmilesError("'.' inside branch", pos_);
      prev_ = -1;
      ++pos_;
    } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
      if (pending_bond_) throw SmilesError("repeated bond symbol", pos_);
      pending_bond_ = bond_from_char(c);
      pending_bond_pos_ = pos_;
      ++pos_;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      close_or_open_ring(c - '0', pos_);
      ++pos_;
    } else if (c == '%') {
      if (pos_ + 2 >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2])))
        throw SmilesError("'%' ring closure needs two digits", pos_);
      const int num = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      close_or_open_ring(num, pos_);
      pos_ += 3;
    } else if (c == '[') {
      parse_bracket_atom();
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      parse_organic_atom();
    } else {
      throw SmilesError(std::string("unexpected character '") + c + "'", pos_);
    }
  }

  static BondOrder bond_from_char(char c) {
    switch (c) {
      case '=': return BondOrder::Double;
      case '#': return BondOrder::Triple;
      case ':': return BondOrder::Aromatic;
      default: return BondOrder::Single;  // '-', '/' and '\' (stereo discarded)
    }
  }

  void parse_organic_atom() {
    const std::size_t at = pos_;
    std::string sym;
    bool aromatic = false;
    // Two-letter symbols first.
    if (text_.compare(pos_, 2, "Cl") == 0 || text_.compare(pos_, 2, "Br") == 0) {
      sym = text_.substr(pos_, 2);
      pos_ += 2;
    } else {
      const char c = text_[pos_];
      if (std::islower(static_cast<unsigned char>(c))) {
        static const std::string aromatic_ok = "bcnops";
        if (aromatic_ok.find(c) == std::string::npos)
          throw SmilesError(std::string("unknown aromatic atom '") + c + "'", pos_);
        aromatic = true;
        sym = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      } else {
        sym = c;
      }
      ++pos_;
    }
    if (sym == "H")
      throw SmilesError("'H' outside brackets is not valid SMILES", at);
    auto el = element_from_symbol(sym);
    if (!el || !info(*el).organic_subset)
      throw SmilesError("unsupported element '" + sym + "'", at);
    add_atom(*el, aromatic, /*bracket=*/false, /*charge=*/0, /*hcount=*/0, at);
  }

  void parse_bracket_atom() {
    const std::size_t at = pos_;
    ++pos_;  // '['
    // isotope (parsed and discarded; descriptors use standard weights)
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ >= text_.size()) throw SmilesError("unterminated bracket atom", at);

    std::string sym;
    bool aromatic = false;
    char c = text_[pos_];
    if (text_.compare(pos_, 2, "Cl") == 0 || text_.compare(pos_, 2, "Br") == 0) {
      sym = text_.substr(pos_, 2);
      pos_ += 2;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      if (std::islower(static_cast<unsigned char>(c))) {
        static const std::string aromatic_ok = "bcnops";
        if (aromatic_ok.find(c) == std::string::npos)
          throw SmilesError(std::string("unknown aromatic atom '") + c + "'", pos_);
        aromatic = true;
        sym = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      } else {
        sym = c;
      }
      ++pos_;
    } else {
      throw SmilesError("expected element symbol in bracket", pos_);
    }
    auto el = element_from_symbol(sym);
    if (!el) throw SmilesError("unsupported element '" + sym + "'", at);

    // chirality: discarded
    while (pos_ < text_.size() && text_[pos_] == '@') ++pos_;

    int hcount = 0;
    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      hcount = 1;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        hcount = text_[pos_] - '0';
        ++pos_;
      }
    }

    int charge = 0;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const int sign = text_[pos_] == '+' ? 1 : -1;
      const char sign_char = text_[pos_];
      ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        charge = sign * (text_[pos_] - '0');
        ++pos_;
      } else {
        charge = sign;
        while (pos_ < text_.size() && text_[pos_] == sign_char) {
          charge += sign;
          ++pos_;
        }
      }
    }

    // atom map class: discarded
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw SmilesError("atom map expects digits", pos_);
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }

    if (pos_ >= text_.size() || text_[pos_] != ']')
      throw SmilesError("expected ']'", pos_ < text_.size() ? pos_ : text_.size() - 1);
    ++pos_;

    add_atom(*el, aromatic, /*bracket=*/true, charge, hcount, at);
  }

  void add_atom(Element el, bool aromatic, bool bracket, int charge, int hcount,
                std::size_t at) {
    ParsedAtom pa;
    pa.atom.element = el;
    pa.atom.aromatic = aromatic;
    pa.atom.formal_charge = charge;
    pa.position = at;
    pa.bracket = bracket;
    pa.bracket_h = hcount;
    const int idx = static_cast<int>(atoms_.size());
    atoms_.push_back(pa);
    if (prev_ >= 0) add_bond(prev_, idx, take_pending_bond(prev_, idx), at);
    prev_ = idx;
  }

  void close_or_open_ring(int num, std::size_t at) {
    if (prev_ < 0) throw SmilesError("ring closure with no preceding atom", at);
    auto it = ring_openings_.find(num);
    if (it == ring_openings_.end()) {
      RingOpening open;
      open.atom = prev_;
      open.order = pending_bond_;
      open.position = at;
      pending_bond_.reset();
      ring_openings_.emplace(num, open);
      return;
    }
    RingOpening open = it->second;
    ring_openings_.erase(it);
    if (open.atom == prev_) throw SmilesError("ring bond to the same atom", at);
    std::optional<BondOrder> order = pending_bond_;
    pending_bond_.reset();
    if (open.order && order && *open.order != *order)
      throw SmilesError("conflicting ring bond orders", at);
    if (!order) order = open.order;
    BondOrder bo = order ? *order : default_bond(open.atom, prev_);
    add_bond(open.atom, prev_, bo, at);
  }

  BondOrder take_pending_bond(int a, int b) {
    if (pending_bond_) {
      BondOrder bo = *pending_bond_;
      pending_bond_.reset();
      return bo;
    }
    return default_bond(a, b);
  }

  BondOrder default_bond(int a, int b) const {
    return (atoms_[a].atom.aromatic && atoms_[b].atom.aromatic)
               ? BondOrder::Aromatic
               : BondOrder::Single;
  }

  void add_bond(int a, int b, BondOrder order, std::size_t at) {
    for (const Bond& existing : bonds_) {
      if ((existing.a == a && existing.b == b) || (existing.a == b && existing.b == a))
        throw SmilesError("duplicate bond between atoms", at);
    }
    bonds_.push_back(Bond{a, b, order});
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  std::optional<BondOrder> pending_bond_;
  std::size_t pending_bond_pos_ = 0;
  std::vector<std::pair<int, std::size_t>> branch_stack_;  // (atom, '(' position)
  std::map<int, RingOpening> ring_openings_;
  std::vector<ParsedAtom> atoms_;
  std::vector<Bond> bonds_;
};

// ---------------------------------------------------------------------------
// Post-parse assembly

void assign_implicit_hydrogens(std::vector<ParsedAtom>& atoms,
                               const std::vector<Bond>& bonds) {
  std::vector<int> order_sum(atoms.size(), 0);
  std::vector<int> connections(atoms.size(), 0);
  for (const Bond& b : bonds) {
    order_sum[b.a] += bond_order_units(b.order);
    order_sum[b.b] += bond_order_units(b.order);
    ++connections[b.a];
    ++connections[b.b];
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    ParsedAtom& pa = atoms[i];
    const ElementInfo& ei = info(pa.atom.element);
    if (pa.bracket) {
      pa.atom.implicit_h = pa.bracket_h;
      const int max_valence = *std::max_element(
          ei.valences.begin(),
          std::find(ei.valences.begin(), ei.valences.end(), 0));
      if (order_sum[i] + pa.bracket_h > max_valence + std::abs(pa.atom.formal_charge))
        throw SmilesError("valence violation on " + std::string(ei.symbol),
                          pa.position);
      continue;
    }
    int sum = order_sum[i];
    // Aromatic atoms written in lowercase carry one ring double bond in the
    // Kekule structure when the element and substitution allow it.
    if (pa.atom.aromatic) {
      const Element e = pa.atom.element;
      if (e == Element::C || e == Element::B) {
        sum += 1;
      } else if ((e == Element::N || e == Element::P) && connections[i] == 2) {
        sum += 1;
      }
    }
    int valence = -1;
    for (int v : ei.valences) {
      if (v == 0) break;
      if (v >= sum) {
        valence = v;
        break;
      }
    }
    if (valence < 0)
      throw SmilesError("valence violation on " + std::string(ei.symbol),
                        pa.position);
    pa.atom.implicit_h = valence - sum;
  }
}

// Fold neutral explicit hydrogens with a single bond to a heavy neighbor
// into that neighbor's implicit count.
void collapse_explicit_hydrogens(std::vector<ParsedAtom>& atoms,
                                 std::vector<Bond>& bonds) {
  std::vector<bool> drop(atoms.size(), false);
  std::vector<int> bond_count(atoms.size(), 0);
  for (const Bond& b : bonds) {
    ++bond_count[b.a];
    ++bond_count[b.b];
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].atom.element != Element::H) continue;
    if (atoms[i].atom.formal_charge != 0 || bond_count[i] != 1) continue;
    for (const Bond& b : bonds) {
      if (b.a != static_cast<int>(i) && b.b != static_cast<int>(i)) continue;
      const int other = b.other(static_cast<int>(i));
      if (atoms[other].atom.element == Element::H) break;
      if (b.order != BondOrder::Single) break;
      atoms[other].atom.implicit_h += 1 + atoms[i].atom.implicit_h;
      drop[i] = true;
      break;
    }
  }
  if (std::none_of(drop.begin(), drop.end(), [](bool d) { return d; })) return;

  std::vector<int> remap(atoms.size(), -1);
  std::vector<ParsedAtom> kept;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (drop[i]) continue;
    remap[i] = static_cast<int>(kept.size());
    kept.push_back(atoms[i]);
  }
  std::vector<Bond> kept_bonds;
  for (const Bond& b : bonds) {
    if (remap[b.a] < 0 || remap[b.b] < 0) continue;
    kept_bonds.push_back(Bond{remap[b.a], remap[b.b], b.order});
  }
  atoms = std::move(kept);
  bonds = std::move(kept_bonds);
}

// Keeps the largest fragment (by heavy atoms, then total atoms, then first
// occurrence). Returns true when anything was discarded.
bool keep_largest_fragment(std::vector<ParsedAtom>& atoms, std::vector<Bond>& bonds) {
  const int n = static_cast<int>(atoms.size());
  std::vector<int> component(n, -1);
  std::vector<std::vector<int>> adj(n);
  for (const Bond& b : bonds) {
    adj[b.a].push_back(b.b);
    adj[b.b].push_back(b.a);
  }
  int ncomp = 0;
  for (int i = 0; i < n; ++i) {
    if (component[i] >= 0) continue;
    std::deque<int> queue{i};
    component[i] = ncomp;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj[u]) {
        if (component[v] < 0) {
          component[v] = ncomp;
          queue.push_back(v);
        }
      }
    }
    ++ncomp;
  }
  if (ncomp <= 1) return false;

  std::vector<int> heavy(ncomp, 0), total(ncomp, 0);
  for (int i = 0; i < n; ++i) {
    ++total[component[i]];
    if (atoms[i].atom.element != Element::H) ++heavy[component[i]];
  }
  int best = 0;
  for (int c = 1; c < ncomp; ++c) {
    if (heavy[c] > heavy[best] || (heavy[c] == heavy[best] && total[c] > total[best]))
      best = c;
  }

  std::vector<int> remap(n, -1);
  std::vector<ParsedAtom> kept;
  for (int i = 0; i < n; ++i) {
    if (component[i] != best) continue;
    remap[i] = static_cast<int>(kept.size());
    kept.push_back(atoms[i]);
  }
  std::vector<Bond> kept_bonds;
  for (const Bond& b : bonds) {
    if (remap[b.a] < 0) continue;
    kept_bonds.push_back(Bond{remap[b.a], remap[b.b], b.order});
  }
  atoms = std::move(kept);
  bonds = std::move(kept_bonds);
  return true;
}

void build_adjacency(Molecule& mol) {
  const int n = mol.atom_count();
  mol.neighbors.assign(n, {});
  mol.incident_bonds.assign(n, {});
  for (int bi = 0; bi < mol.bond_count(); ++bi) {
    const Bond& b = mol.bonds[bi];
    if (b.a < 0 || b.b < 0 || b.a >= n || b.b >= n)
      throw DataError("bond endpoint out of range");
    mol.neighbors[b.a].push_back(b.b);
    mol.neighbors[b.b].push_back(b.a);
    mol.incident_bonds[b.a].push_back(bi);
    mol.incident_bonds[b.b].push_back(bi);
  }
  for (int i = 0; i < n; ++i) {
    int deg = 0;
    for (int j : mol.neighbors[i])
      if (mol.atoms[j].element != Element::H) ++deg;
    mol.atoms[i].degree = deg;
  }
}

// Shortest cycle through a given bond: BFS between its endpoints with the
// bond removed. Returns the cycle as an atom sequence, empty if acyclic.
std::vector<int> shortest_cycle_through(const Molecule& mol, int bond_index) {
  const Bond& target = mol.bonds[bond_index];
  const int n = mol.atom_count();
  std::vector<int> parent(n, -2);
  std::deque<int> queue{target.a};
  parent[target.a] = -1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (u == target.b) break;
    for (std::size_t k = 0; k < mol.neighbors[u].size(); ++k) {
      if (mol.incident_bonds[u][k] == bond_index) continue;
      int v = mol.neighbors[u][k];
      if (parent[v] != -2) continue;
      parent[v] = u;
      queue.push_back(v);
    }
  }
  if (parent[target.b] == -2) return {};
  std::vector<int> cycle;
  for (int u = target.b; u != -1; u = parent[u]) cycle.push_back(u);
  return cycle;  // a ... b path; closing bond is (a, b)
}

// Bond indices of a cycle given as an atom sequence.
std::vector<int> cycle_bonds(const Molecule& mol, const std::vector<int>& cycle) {
  std::vector<int> result;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const int u = cycle[i];
    const int v = cycle[(i + 1) % cycle.size()];
    for (std::size_t k = 0; k < mol.neighbors[u].size(); ++k) {
      if (mol.neighbors[u][k] == v) {
        result.push_back(mol.incident_bonds[u][k]);
        break;
      }
    }
  }
  return result;
}

// Smallest set of smallest rings: per-bond shortest cycles, deduplicated by
// atom set, taken smallest-first subject to GF(2) independence of their
// bond-incidence vectors, until the cyclomatic count is reached.
void perceive_rings(Molecule& mol) {
  mol.rings.clear();
  const int cyclomatic = mol.bond_count() - mol.atom_count() + 1;
  if (cyclomatic <= 0) return;

  struct Candidate {
    std::vector<int> cycle;        // atom sequence
    std::vector<int> sorted_atoms;
  };
  std::vector<Candidate> candidates;
  for (int bi = 0; bi < mol.bond_count(); ++bi) {
    std::vector<int> cycle = shortest_cycle_through(mol, bi);
    if (cycle.empty()) continue;
    Candidate c;
    c.sorted_atoms = cycle;
    std::sort(c.sorted_atoms.begin(), c.sorted_atoms.end());
    c.cycle = std::move(cycle);
    candidates.push_back(std::move(c));
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.cycle.size() != y.cycle.size())
                return x.cycle.size() < y.cycle.size();
              return x.sorted_atoms < y.sorted_atoms;
            });
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](const Candidate& x, const Candidate& y) {
                                 return x.sorted_atoms == y.sorted_atoms;
                               }),
                   candidates.end());

  const int words = (mol.bond_count() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> basis;  // row-reduced bond vectors
  auto reduce = [&](std::vector<std::uint64_t> vec) -> bool {
    for (const auto& row : basis) {
      int pivot = -1;
      for (int w = 0; w < words && pivot < 0; ++w)
        if (row[w]) pivot = w * 64 + std::countr_zero(row[w]);
      if (pivot >= 0 && (vec[pivot / 64] >> (pivot % 64)) & 1) {
        for (int w = 0; w < words; ++w) vec[w] ^= row[w];
      }
    }
    if (std::all_of(vec.begin(), vec.end(), [](std::uint64_t w) { return w == 0; }))
      return false;
    basis.push_back(std::move(vec));
    return true;
  };

  for (const Candidate& c : candidates) {
    if (static_cast<int>(mol.rings.size()) == cyclomatic) break;
    std::vector<std::uint64_t> vec(words, 0);
    for (int bi : cycle_bonds(mol, c.cycle)) vec[bi / 64] |= 1ULL << (bi % 64);
    if (reduce(std::move(vec))) mol.rings.push_back(c.cycle);
  }
}

// Kekule benzene rings: six carbons, strictly alternating single/double
// around the cycle. Flagged aromatic (atoms and ring bonds).
void aromatize_alternating_rings(Molecule& mol) {
  for (const auto& ring : mol.rings) {
    if (ring.size() != 6) continue;
    bool all_carbon = true;
    for (int a : ring)
      if (mol.atoms[a].element != Element::C) all_carbon = false;
    if (!all_carbon) continue;

    std::vector<int> ring_bond_idx = cycle_bonds(mol, ring);
    if (ring_bond_idx.size() != 6) continue;
    bool alternating = true;
    for (std::size_t i = 0; i < 6 && alternating; ++i) {
      BondOrder cur = mol.bonds[ring_bond_idx[i]].order;
      BondOrder nxt = mol.bonds[ring_bond_idx[(i + 1) % 6]].order;
      bool ok = (cur == BondOrder::Single && nxt == BondOrder::Double) ||
                (cur == BondOrder::Double && nxt == BondOrder::Single);
      if (!ok) alternating = false;
    }
    if (!alternating) continue;
    for (int a : ring) mol.atoms[a].aromatic = true;
    for (int bi : ring_bond_idx) mol.bonds[bi].order = BondOrder::Aromatic;
  }
}

}  // namespace

const char* element_symbol(Element e) { return info(e).symbol; }
double element_mass(Element e) { return info(e).mass; }
bool element_is_organic_subset(Element e) { return info(e).organic_subset; }

const Bond* Molecule::bond_between(int a, int b) const {
  for (std::size_t k = 0; k < neighbors[a].size(); ++k)
    if (neighbors[a][k] == b) return &bonds[incident_bonds[a][k]];
  return nullptr;
}

Molecule parse_smiles(const std::string& text) {
  SmilesParser parser(text);
  parser.run();

  auto& parsed = parser.atoms();
  auto& bonds = parser.bonds();
  assign_implicit_hydrogens(parsed, bonds);
  collapse_explicit_hydrogens(parsed, bonds);
  keep_largest_fragment(parsed, bonds);

  Molecule mol;
  mol.source_smiles = text;
  mol.atoms.reserve(parsed.size());
  for (const ParsedAtom& pa : parsed) mol.atoms.push_back(pa.atom);
  mol.bonds = std::move(bonds);
  build_adjacency(mol);
  perceive_rings(mol);
  aromatize_alternating_rings(mol);
  return mol;
}

std::vector<std::vector<int>> distance_matrix(const Molecule& mol) {
  const int n = mol.atom_count();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (int src = 0; src < n; ++src) {
    dist[src][src] = 0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : mol.neighbors[u]) {
        if (dist[src][v] >= 0) continue;
        dist[src][v] = dist[src][u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::uint64_t structure_key(const Molecule& mol) {
  const int n = mol.atom_count();
  std::vector<std::uint64_t> code(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = mol.atoms[i];
    code[i] = hash_u64_span(0x6d6f6c6b6579ULL,
                            {static_cast<std::uint64_t>(a.element),
                             static_cast<std::uint64_t>(a.formal_charge + 16),
                             static_cast<std::uint64_t>(a.implicit_h),
                             static_cast<std::uint64_t>(a.aromatic ? 1 : 0),
                             static_cast<std::uint64_t>(a.degree)});
  }
  std::vector<std::uint64_t> next(n);
  for (int round = 0; round < n; ++round) {
    for (int i = 0; i < n; ++i) {
      std::vector<std::uint64_t> env;
      env.reserve(mol.neighbors[i].size());
      for (std::size_t k = 0; k < mol.neighbors[i].size(); ++k) {
        const Bond& b = mol.bonds[mol.incident_bonds[i][k]];
        env.push_back(hash_combine(static_cast<std::uint64_t>(b.order),
                                   code[mol.neighbors[i][k]]));
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = code[i];
      for (std::uint64_t e : env) h = hash_combine(h, e);
      next[i] = h;
    }
    code.swap(next);
  }
  std::vector<std::uint64_t> atom_codes = code;
  std::sort(atom_codes.begin(), atom_codes.end());
  std::vector<std::uint64_t> bond_codes;
  bond_codes.reserve(mol.bonds.size());
  for (const Bond& b : mol.bonds) {
    bond_codes.push_back(hash_u64_span(static_cast<std::uint64_t>(b.order),
                                       {std::min(code[b.a], code[b.b]),
                                        std::max(code[b.a], code[b.b])}));
  }
  std::sort(bond_codes.begin(), bond_codes.end());
  std::uint64_t h = hash_u64_span(0x6d6f6c746f70ULL,
                                  {static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(mol.bond_count())});
  for (std::uint64_t c : atom_codes) h = hash_combine(h, c);
  for (std::uint64_t c : bond_codes) h = hash_combine(h, c);
  return h;
}

Molecule make_molecule(std::vector<Atom> atoms, std::vector<Bond> bonds) {
  Molecule mol;
  mol.atoms = std::move(atoms);
  mol.bonds = std::move(bonds);
  build_adjacency(mol);
  perceive_rings(mol);
  return mol;
}

}  // namespace autoqsar
