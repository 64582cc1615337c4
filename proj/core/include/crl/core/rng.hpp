#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace crl {

/// Identifies one repetition of a randomized protocol. Each (base_seed,
/// trial_index, salt) triple maps to an independent, reproducible stream.
struct RunSeed {
  std::uint64_t base_seed = 0;
  std::uint64_t trial_index = 0;

  std::uint64_t stream_seed(std::uint64_t salt = 0) const noexcept;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic generator. Distributions are implemented here rather than
/// taken from <random> so sequences do not depend on the standard library
/// vendor.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  explicit Rng(const RunSeed& seed, std::uint64_t salt = 0) : engine_(seed.stream_seed(salt)) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace crl
