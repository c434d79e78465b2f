#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace autoqsar {

// Deterministic 64-bit mixing used everywhere reproducibility matters:
// fingerprint keys, derived split seeds, structure hashes, model ids.
// Fixed constants, no per-process seeding, identical output on every
// platform. Not cryptographic.

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

inline std::uint64_t hash_u64_span(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> vals) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t v : vals) h = hash_combine(h, v);
  return h;
}

// FNV-1a over bytes, folded through mix64. Used for strings and file digests.
inline std::uint64_t hash_bytes(std::string_view bytes,
                                std::uint64_t seed = 0x517cc1b727220a95ULL) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

// Counter-based deterministic generator (splitmix64). std:: engines would do,
// but std distributions are not portable across standard libraries, so
// bounded draws and shuffles live here too.
class StableRng {
 public:
  explicit StableRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, n). Rejection-free multiply-shift; bias is < 2^-32 for
  // any n that fits practical collection sizes.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on two uniform draws.
  double normal() {
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace autoqsar
