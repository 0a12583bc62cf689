#pragma once

#include <cstdint>

namespace metapred::rng {

// splitmix64 finalizer (full avalanche).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Counter-based uniform stream with keyed substream derivation.
//
// Draw i of a stream with key k is mix64(k + i*gamma), i.e. splitmix64
// with the counter made explicit. Substreams are derived from the
// parent's key (not its counter position), so a stream keyed by a
// replication or bootstrap index yields the same numbers no matter how
// the surrounding loop is partitioned across threads.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : key_(mix64(seed ^ kSeedSalt)) {}

  Stream substream(std::uint64_t id) const {
    return Stream(from_key{}, mix64(key_ ^ mix64(id ^ kChildSalt)));
  }
  Stream substream(std::uint64_t a, std::uint64_t b) const {
    return substream(a).substream(b);
  }

  std::uint64_t next_u64() { return mix64(key_ + ++counter_ * kGamma); }

  // Strictly inside (0,1); safe through inverse-CDF transforms.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  struct from_key {};
  Stream(from_key, std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSeedSalt = 0x5bf0363db78a5a7dULL;
  static constexpr std::uint64_t kChildSalt = 0x94357c3f09a67b2cULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Inverse-CDF draws: each consumes exactly one uniform, which keeps
// substream layouts stable.
double normal(Stream& s);                      // N(0,1)
double student_t(Stream& s, double df);        // t(df)
double chi_squared(Stream& s, double df);      // chi^2(df)
int uniform_int(Stream& s, int lo, int hi);    // inclusive range
int binomial(Stream& s, int n, double p);

}  // namespace metapred::rng
