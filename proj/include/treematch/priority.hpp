#pragma once
// Pseudorandom total order on integer tuples. Each tuple gets a 128-bit key
// derived from (seed, arity, coordinates); ties (vanishingly rare) fall back
// to lexicographic order so the comparator is a total order regardless.

#include <cstdint>
#include <vector>

namespace treematch {

struct PriorityKey {
  std::uint64_t hi = 0, lo = 0;
  friend bool operator<(const PriorityKey& a, const PriorityKey& b) {
    return a.hi != b.hi ? a.hi < b.hi : a.lo < b.lo;
  }
  friend bool operator==(const PriorityKey& a, const PriorityKey& b) {
    return a.hi == b.hi && a.lo == b.lo;
  }
};

// splitmix64 finalizer; full-avalanche, cheap.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Key for an ordered tuple. Order-sensitive in the coordinates: (1,2) and
// (2,1) hash apart. The arity tag keeps length-m and length-m' streams
// independent even on shared prefixes.
inline PriorityKey tuple_priority(std::uint64_t seed, int arity, const std::vector<int>& coords) {
  std::uint64_t h1 = mix64(seed ^ (0x517CC1B727220A95ull * static_cast<std::uint64_t>(arity)));
  std::uint64_t h2 = mix64(h1 ^ 0xD1B54A32D192ED03ull);
  for (int c : coords) {
    std::uint64_t w = static_cast<std::uint64_t>(static_cast<std::uint32_t>(c));
    h1 = mix64(h1 ^ w);
    h2 = mix64(h2 ^ (h1 + w));
  }
  return {h1, h2};
}

// Priority order with deterministic lexicographic tiebreak.
inline bool priority_less(std::uint64_t seed, int arity, const std::vector<int>& a,
                          const std::vector<int>& b) {
  PriorityKey ka = tuple_priority(seed, arity, a);
  PriorityKey kb = tuple_priority(seed, arity, b);
  if (!(ka == kb)) return ka < kb;
  return a < b;
}

}  // namespace treematch
