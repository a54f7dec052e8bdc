#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace bisim {

/// Deterministic random stream.
///
/// Wraps std::mt19937_64 (the engine itself is bit-exact across platforms)
/// and maps raw 64-bit words to doubles, indices and Gaussians by hand
/// instead of going through the implementation-defined <random>
/// distributions, so equal seeds give bit-identical draws everywhere.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1); never returns an endpoint.
  double next_double_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform index in [0, n) via a 128-bit multiply-shift.
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal draw (Box-Muller, cosine branch). Two words per draw,
  /// no cached state, so derived streams stay call-order independent.
  double next_gaussian() {
    const double u1 = next_double_open();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bisim
