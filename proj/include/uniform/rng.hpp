// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace uniform {

/// Seeded generator with platform-independent conversions. The engine is
/// std::mt19937_64, whose output sequence is fixed by the standard; the
/// real-valued draws below avoid std::*_distribution, whose algorithms are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached spare, so the stream position
  /// depends only on the number of calls).
  double normal();

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Independent child stream keyed by a label.
  Rng fork(std::string_view label) const;

 private:
  std::mt19937_64 engine_;
};

/// FNV-1a, used to derive per-name seeds that do not depend on ordering.
std::uint64_t stable_hash(std::string_view text, std::uint64_t basis = 14695981039346656037ull);

}  // namespace uniform
