#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "elastic_tops/elliptic.hpp"
#include "elastic_tops/lie_dynamics.hpp"

namespace etop::reduction {

/// Candidate definitions of K̃2 = K2 - kH̃ - (k² + K4²). Only Consistent keeps
/// both subtracted terms and makes the variety relation vanish for k = ±1;
/// DropCurvature omits k², DropK4 omits K4². The two variants are kept for
/// comparison.
enum class K2Convention { Consistent, DropCurvature, DropK4 };

std::string to_string(K2Convention c);

/// Rescaled coordinates in which the translation vector becomes 1.
struct ReducedState {
  Complex x, y, x3, y3;
  int k = 0;

  /// q = x² - y + k, recomputed on every call.
  Complex q() const { return x * x - y + double(k); }
};

struct ReducedConstants {
  double H = 0, K2 = 0, K3 = 0, K4sq = 0;
  int k = 0;
  double Htilde = 0;   // 2H - 2k
  double K2tilde = 0;  // per the chosen convention
  K2Convention convention = K2Convention::Consistent;

  double K4() const { return std::sqrt(std::max(0.0, K4sq)); }
};

ReducedConstants make_constants(double H, double K2, double K3, double K4sq, int k,
                                K2Convention conv = K2Convention::Consistent);

/// Integrals evaluated directly in reduced coordinates.
ReducedConstants constants_of(const ReducedState& s, K2Convention conv = K2Convention::Consistent);

struct Rescaled {
  ReducedState state;
  ReducedConstants consts;
  double time_scale = 1;  // τ = time_scale · t
  Complex a_eff;          // c3 (a1 + i a2)
};

/// Maps a physical state in the Kowalewski case to reduced coordinates.
/// Throws std::invalid_argument outside the Kowalewski case or for a = 0.
Rescaled rescale(const lie::State& p, const lie::ModelParams& params,
                 K2Convention conv = K2Convention::Consistent);

/// Inverse of rescale for the state part.
lie::State unrescale(const ReducedState& s, const lie::ModelParams& params);

/// d/dτ of the reduced coordinates from the reduced equations.
ReducedState reduced_field(const ReducedState& s);
/// d/dτ obtained by pushing the full vector field through the rescaling.
ReducedState pushed_forward_field(const lie::State& p, const lie::ModelParams& params);
/// σ(x, y, x3, y3) = (x̄, ȳ, -x3, -y3).
ReducedState involution(const ReducedState& s);

/// P(x) = K̃2 - 2K3 x + 2H x² - x⁴ as a quartic curve.
elliptic::QuarticCurve quartic_P(const ReducedConstants& c);

Complex form_R0(Complex x, Complex y, const ReducedConstants& c);
/// R1 := Φ_θ at θ = H - k.
Complex form_R1(Complex x, Complex y, const ReducedConstants& c);
/// An expanded coefficient formula for R1 that does not agree with Φ_θ at
/// θ = H - k. Kept only to report how far it is from form_R1.
Complex form_R1_expanded_variant(Complex x, Complex y, const ReducedConstants& c);

/// |P(x)q̄ + P(x̄)q + R1(x, x̄) + K4²(x - x̄)²|, scale-relative.
double variety_residual(const ReducedState& s, const ReducedConstants& c);

struct QRoots {
  Complex first, second;
  bool degenerate = false;  // leading coefficient P(x̄) vanished; only `first` is meaningful
  /// Root closest to `guess`. Both roots have modulus K4 on real motions,
  /// so the branch has to come from continuity.
  Complex nearest(Complex guess) const;
};

/// Roots of P(x̄)q² + (R1(x, x̄) + K4²(x - x̄)²)q + K4² P(x) = 0.
QRoots solve_q(Complex x, const ReducedConstants& c);

/// |-4(dx/dτ)² - P(x) - q(x - x̄)²|, scale-relative.
double extremal_ode_residual(const ReducedState& s, const ReducedConstants& c, Complex dxdt);

/// ζ = x3 x - y3 satisfies ζζ̄ = R0(x, x̄); returns the scale-relative mismatch.
double zeta_residual(const ReducedState& s, const ReducedConstants& c);

struct X3Y3 {
  Complex x3sq, y3sq;
};

/// x3² = H̃ - (x + x̄)² + (q + q̄) and y3² = K̃2 - x²x̄² + x²q̄ + x̄²q - 2k x x̄.
X3Y3 recover_x3_y3(const ReducedState& s, const ReducedConstants& c);

/// x3²y3² against (K3 - (x x̄ + k)(x + x̄) + (x q̄ + x̄ q))², scale-relative.
double product_identity_residual(const X3Y3& r, const ReducedState& s, const ReducedConstants& c);

struct ResidualStats {
  double max = 0, mean = 0;
  std::size_t count = 0;
  void add(double v);
  void finish();
};

struct ReductionReport {
  ResidualStats variety, extremal_ode, zeta, product, x3_recovery, y3_recovery, q_root;
  ReducedConstants consts;
};

/// Applies every residual to each sample of a Kowalewski-case trajectory,
/// with the constants fixed from the first sample.
ReductionReport reduction_report(const lie::Trajectory& traj, const lie::ModelParams& params,
                                 K2Convention conv = K2Convention::Consistent);

}  // namespace etop::reduction
