#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fpaug {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t v) noexcept;

/// Order-sensitive 64-bit hash of a key tuple; stable across platforms and
/// builds. Used to derive per-item seeds.
std::uint64_t stable_hash(std::initializer_list<std::uint64_t> parts) noexcept;

/// Seeded random stream. The engine is mt19937_64, whose output sequence is
/// fixed by the standard; the bounded draws below avoid the
/// implementation-defined std distributions so results match everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform real in [0, 1).
  double uniform01();

  /// Uniform real in [lo, hi).
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fpaug
