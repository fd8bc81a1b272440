#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "elastic_tops/reduction.hpp"

namespace etop::quadrature {

struct QuadratureConstants {
  double k1 = 0, k2 = 0;  // H/6 - k/2 ± K4/2
  double g2 = 0, g3 = 0;
  int rho = 1;
};

QuadratureConstants make_quadrature_constants(const reduction::ReducedConstants& c);

struct XiPair {
  Complex xi1, xi2;
  Complex eta1, eta2;  // principal square roots of 4ξ³ - g2ξ - g3
  Complex uv;          // √P(x) √P(x̄), equal to |P(x)| on real motions
};

/// ξ_i = (R0 + (-1)^i uv) / (2(x - x̄)²) + H/6 - k/2 with v = ū.
/// Throws DegeneratePointError when x is real (the two points coalesce).
XiPair xi_from_state(const reduction::ReducedState& s, const reduction::ReducedConstants& c);

/// The classical separation variables written with ℓ1 = H/3:
/// s = (R(x, y) - H(x - y)² ∓ √P(x)√P(y)) / (2(x - y)²) + H/6.
std::array<Complex, 2> classical_s_variables(Complex x, Complex y, Complex uv,
                                             const reduction::ReducedConstants& c);

/// U(ξ) = -(4ξ³ - g2ξ - g3)(ξ - k1)(ξ - k2).
class Quintic {
 public:
  explicit Quintic(const QuadratureConstants& q);
  /// Coefficients, highest degree first, from multiplying out the factors.
  const std::array<double, 6>& coefficients() const { return coeffs_; }
  Complex operator()(Complex xi) const;
  Complex factored(Complex xi) const;

 private:
  QuadratureConstants q_;
  std::array<double, 6> coeffs_{};
};

struct QuadratureOptions {
  /// Samples with |x - x̄| below this fraction of (1 + |x|) are treated as
  /// coalescing and excluded, together with their stencil neighbours.
  double coalescence_window = 0.05;
};

struct QuadratureReport {
  std::array<double, 2> max_residual_sq{0, 0};
  double max_residual_sum = 0;
  double max_difference_identity = 0;  // |(ξ2 - ξ1)(x - x̄)² - uv|, relative
  std::vector<int> rho;                // one sign per seamed segment
  std::size_t seam_count = 0;
  std::size_t excluded_windows = 0;
  std::size_t excluded_samples = 0;
  std::size_t samples_used = 0;
};

/// Trajectory-level check of (dξi/dτ)²(ξ1 - ξ2)² = U(ξi) and of the summed
/// differentials. The trajectory must be sampled on a uniform time grid.
QuadratureReport quadrature_residual(const lie::Trajectory& traj, const lie::ModelParams& params,
                                     const QuadratureOptions& opts = {});

}  // namespace etop::quadrature
