#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "autoqsar/molgraph.hpp"

namespace autoqsar {

enum class FingerprintScheme : std::uint8_t { Radial, Linear, Dendritic, Molprint2D };

const char* scheme_name(FingerprintScheme s);
FingerprintScheme scheme_from_name(const std::string& name);  // throws ConfigError

// Default parameters: declared, not inferred from any reference tool.
int default_fingerprint_param(FingerprintScheme s);  // radius 3 / path length 7 / distance 2

// Sparse count fingerprint. Keys come from a fixed-constant 64-bit hash, so
// feature maps are identical across platforms and runs; unrelated features
// may collide and merge, which is accepted.
struct Fingerprint {
  FingerprintScheme scheme = FingerprintScheme::Radial;
  int param = 0;  // max radius (radial), max path bonds (linear/dendritic), max distance (molprint2d)
  std::map<std::uint64_t, std::uint32_t> features;

  bool empty() const { return features.empty(); }
};

// Parameter ranges: radial radius in [0,3]; linear/dendritic path length in
// [1,7]; molprint2d distance in [0,3]. Out of range throws ConfigError.
Fingerprint fingerprint(const Molecule& mol, FingerprintScheme scheme, int param);
Fingerprint fingerprint(const Molecule& mol, FingerprintScheme scheme);  // default param

// Min-max similarity over count vectors; equals classic Tanimoto on binary
// counts. Throws ConfigError on scheme/param mismatch. Two empty
// fingerprints compare as 0.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

// Folded binary view (key mod bits) for the Bayes learner.
std::vector<std::uint8_t> fold_binary(const Fingerprint& fp, int bits = 2048);

}  // namespace autoqsar
