#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace autoqsar {

// Supported elements. The parser rejects anything else.
enum class Element : std::uint8_t { B, C, N, O, P, S, F, Cl, Br, I, H };

const char* element_symbol(Element e);
double element_mass(Element e);
bool element_is_organic_subset(Element e);

struct Atom {
  Element element = Element::C;
  int formal_charge = 0;
  int implicit_h = 0;
  bool aromatic = false;
  int degree = 0;  // heavy-atom neighbors
};

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;

  int other(int atom) const { return atom == a ? b : a; }
};

// Immutable after parse_smiles returns it. Adjacency is precomputed; rings
// hold the smallest set of smallest rings as atom-index cycles.
struct Molecule {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<std::vector<int>> rings;
  std::string source_smiles;

  std::vector<std::vector<int>> neighbors;       // atom -> adjacent atom indices
  std::vector<std::vector<int>> incident_bonds;  // atom -> incident bond indices

  int atom_count() const { return static_cast<int>(atoms.size()); }
  int bond_count() const { return static_cast<int>(bonds.size()); }
  const Bond* bond_between(int a, int b) const;
};

// Parses the organic subset plus bracket atoms (isotope, charge, explicit H
// count). Branches, ring closures including %nn, bond symbols - = # :, and
// aromatic lowercase are supported. Stereo markers / \ @ are accepted and
// discarded. Dot-separated fragments keep the largest heavy-atom fragment.
// Throws SmilesError with the offending position on any malformed input.
Molecule parse_smiles(const std::string& text);

// Topological (bond-count) shortest-path distances over the heavy-atom
// graph, via BFS from every atom. Connectivity is guaranteed by the parser.
std::vector<std::vector<int>> distance_matrix(const Molecule& mol);

// Isomorphism-invariant structure key: iterative neighborhood refinement of
// atom invariants hashed together with the bond multiset. Equal for any two
// parses of the same structure regardless of input atom order; used for
// duplicate detection during dataset curation.
std::uint64_t structure_key(const Molecule& mol);

// Assembles a Molecule from explicit atoms/bonds (test and tooling use).
// Fills neighbors/degrees, perceives rings, validates indices.
Molecule make_molecule(std::vector<Atom> atoms, std::vector<Bond> bonds);

}  // namespace autoqsar
