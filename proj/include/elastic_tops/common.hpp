#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace etop {

using Complex = std::complex<double>;

/// Curvature of the symmetric space: selects E3 (flat), SO(4) (elliptic)
/// or SO(1,3) (hyperbolic).
enum class Curvature : int { Hyperbolic = -1, Flat = 0, Elliptic = 1 };

inline int value(Curvature k) { return static_cast<int>(k); }

/// Throws std::invalid_argument unless k is -1, 0 or 1.
Curvature curvature_from_int(int k);

std::string to_string(Curvature k);

/// Raised when a formula is evaluated at a point where it degenerates
/// (vanishing denominator, coalescing points, 2-torsion).
class DegeneratePointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Square root of `square` on the branch closest to `previous`.
Complex continue_sqrt(Complex square, Complex previous);

/// Seeded generator shared by the verification routines. Draws are
/// reproducible for a given 64-bit seed.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double sigma = 1.0) {
    return std::normal_distribution<double>(mean, sigma)(engine_);
  }
  /// Complex number with independent normal real and imaginary parts.
  Complex complex_normal(double sigma = 1.0) {
    return {normal(0.0, sigma), normal(0.0, sigma)};
  }
  Complex complex_in_disk(double radius) {
    for (;;) {
      Complex z{uniform(-radius, radius), uniform(-radius, radius)};
      if (std::abs(z) <= radius) return z;
    }
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace etop
