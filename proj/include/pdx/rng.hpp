#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include "pdx/vector.hpp"

namespace pdx {

// Counter-based generator: output n is splitmix64(seed + n * golden_gamma).
// Every stream is fully described by (seed, counter), which keeps traces
// reproducible across platforms and standard libraries (std::normal_distribution
// is not). Gaussians use the Box-Muller transform on pairs of uniforms.
class Rng {
 public:
  static constexpr const char* kName = "splitmix64-boxmuller/v1";

  explicit Rng(std::uint64_t seed = 0) : seed_(seed) {}

  // Independent stream for (master seed, stream id); used to split one master
  // seed across runs and sweep cells.
  static Rng stream(std::uint64_t master, std::uint64_t stream_id) {
    return Rng(mix(master ^ mix(stream_id + 0x632BE59BD9B4E019ULL)));
  }

  // Seed derived from a sequence of keys, folded left to right.
  static std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t s = mix(master);
    for (std::uint64_t k : keys) s = mix(s ^ mix(k + 0x9E3779B97F4A7C15ULL));
    return s;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix(seed_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire-style rejection keeps the draw unbiased.
    const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} - n + 1) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= limit) return r % n;
    }
  }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  RealVector normal_vector(std::size_t dim, double sigma = 1.0) {
    RealVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = sigma * normal();
    return v;
  }

  // Uniform on the unit sphere S^{dim-1}.
  RealVector unit_sphere(std::size_t dim) {
    for (;;) {
      RealVector v = normal_vector(dim);
      const double n = norm(v);
      if (n > 0.0) return (1.0 / n) * std::move(v);
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  bool operator==(const Rng&) const = default;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pdx
