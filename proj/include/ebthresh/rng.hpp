#pragma once

#include <cstdint>

#include "ebthresh/normal.hpp"

namespace ebthresh::rng {

// Philox2x64-10 counter-based generator. Draw i of a named stream is a pure
// function of (key, stream, i), so replications can be evaluated in any order
// or in parallel with bit-identical results.

struct Block {
  std::uint64_t a, b;
};

inline Block philox2x64(std::uint64_t c0, std::uint64_t c1, std::uint64_t key) {
  constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ULL;
  constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;
  for (int round = 0; round < 10; ++round) {
    const unsigned __int128 prod =
        static_cast<unsigned __int128>(kMul) * c0;
    const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(prod);
    c0 = hi ^ key ^ c1;
    c1 = lo;
    key += kWeyl;
  }
  return {c0, c1};
}

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed derivation for named substreams (domain tags below).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t domain,
                            std::uint64_t index = 0) {
  return mix64(mix64(seed ^ domain * 0x9E3779B97F4A7C15ULL) ^ index);
}

inline constexpr std::uint64_t kNoiseDomain = 0x6e6f6973;
inline constexpr std::uint64_t kPositionDomain = 0x706f7369;
inline constexpr std::uint64_t kValueDomain = 0x76616c75;
inline constexpr std::uint64_t kSignalDomain = 0x7369676e;
inline constexpr std::uint64_t kCellDomain = 0x63656c6c;
inline constexpr std::uint64_t kReplicationDomain = 0x72657073;

class Stream {
 public:
  Stream(std::uint64_t key, std::uint64_t stream_id)
      : key_(key), stream_(stream_id) {}

  // attempt < 2^16 and i < 2^48 keep the counter words disjoint
  std::uint64_t bits(std::uint64_t i, std::uint32_t attempt = 0) const {
    return philox2x64(i + (static_cast<std::uint64_t>(attempt) << 48), stream_,
                      key_)
        .a;
  }

  // strictly inside (0, 1)
  double uniform01(std::uint64_t i, std::uint32_t attempt = 0) const {
    return (static_cast<double>(bits(i, attempt) >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal(std::uint64_t i) const { return inv_norm_cdf(uniform01(i)); }

  // unbiased uniform draw on [0, bound)
  std::uint64_t below(std::uint64_t i, std::uint64_t bound) const {
    const std::uint64_t rem = (~bound + 1) % bound;  // 2^64 mod bound
    const std::uint64_t limit = 0ULL - rem;          // accept v < limit
    for (std::uint32_t attempt = 0;; ++attempt) {
      const std::uint64_t v = bits(i, attempt + 1);
      if (limit == 0 || v < limit) return v % bound;
    }
  }

 private:
  std::uint64_t key_, stream_;
};

}  // namespace ebthresh::rng
