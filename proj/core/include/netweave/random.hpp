#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace netweave {

/// FNV-1a over the bytes of `text`. Stable across platforms and runs.
std::uint64_t stable_hash(std::string_view text) noexcept;

/// Derives an independent sub-seed from a parent seed and a salt.
/// Sub-seeds for distinct salts are decorrelated (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt) noexcept;

/// Seeded generator with platform-independent draws.
///
/// The standard distributions are implementation-defined, so draws here are
/// built directly on the 64-bit Mersenne Twister output. Same seed, same
/// sequence on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn from unnormalized non-negative weights.
  std::size_t weighted_index(const std::vector<double>& weights);

 private:
  std::mt19937_64 engine_;
};

/// `k` distinct values from [0, n), in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace netweave
