#pragma once

#include <cstdint>
#include <random>

namespace ewad {

using Rng = std::mt19937_64;

// Seed for the i-th independent work item of a run.  Keeping the derivation
// a pure function of (master, index) makes parallel generation independent
// of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return master ^ index;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace ewad
