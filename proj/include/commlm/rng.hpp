#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace commlm {

/// Seeded random source shared by every sampling step.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not (they differ between
/// library vendors), so bounded integers, unit reals and shuffles are derived
/// here from raw engine output:
///   below(n)  : rejection sampling on 64-bit draws, r % n with r >= (2^64 mod n)
///   uniform() : top 53 bits of one draw, scaled by 2^-53
///   shuffle   : Fisher-Yates from the back, j = below(i + 1)
/// A given seed therefore reproduces the same samples on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform real in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stage seed from the global seed and a stage name:
/// splitmix64(seed ^ fnv1a64(stage)). Stages can then be rerun in isolation.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage);

/// k distinct indices drawn uniformly from [0, n), returned in ascending
/// order. Partial Fisher-Yates over the index range. Requires k <= n.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng);

}  // namespace commlm
