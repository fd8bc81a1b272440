#pragma once

#include <array>
#include <optional>

#include "elastic_tops/common.hpp"

namespace etop::elliptic {

/// P(x) = A + 4Bx + 6Cx² + 4Dx³ + Ex⁴ together with its biquadratic forms.
struct QuarticCurve {
  Complex A, B, C, D, E;

  /// Throws std::invalid_argument when every coefficient vanishes.
  void validate() const;

  Complex P(Complex x) const;
  Complex dP(Complex x) const;
  /// R(x, y) = A + 2B(x+y) + 3C(x²+y²) + 2Dxy(x+y) + Ex²y², so R(x, x) = P(x).
  Complex R(Complex x, Complex y) const;
  /// Companion form with R² + (x-y)² R̂ = P(x)P(y).
  Complex Rhat(Complex x, Complex y) const;
  /// Q(x) = R̂(x, x).
  Complex Q(Complex x) const { return Rhat(x, x); }
  /// Q from P(x)·∂²R/∂x∂y(x, x) - ¼P'(x)², an independent route to R̂(x, x).
  Complex Q_from_derivatives(Complex x) const;

  static QuarticCurve lemniscate() { return {1.0, 0.0, 0.0, 0.0, -1.0}; }
};

/// Coefficients α, β, 3γ, δ, ε, ζ of R̂ in
/// R̂ = α + 2β(x+y) + 3γ(x²+y²) + 2δxy(x+y) + εx²y² - ζ(x-y)².
struct RhatCoefficients {
  Complex alpha, beta, gamma3, delta, epsilon, zeta;
};
RhatCoefficients rhat_coefficients(const QuarticCurve& c);

/// The pencil Φ_θ = -(x-y)²θ² + 2Rθ + R̂ and its coefficient quadratics,
/// Φ_θ(x, y) = a_θ(x)y² + 2b_θ(x)y + c_θ(x).
class ThetaFamily {
 public:
  ThetaFamily(const QuarticCurve& curve, Complex theta);

  Complex theta() const { return theta_; }
  const QuarticCurve& curve() const { return curve_; }

  /// R_θ = R - θ(x-y)².
  Complex R_theta(Complex x, Complex y) const;
  Complex Phi(Complex x, Complex y) const;
  Complex a(Complex x) const;
  Complex b(Complex x) const;
  Complex c(Complex x) const;
  Complex da(Complex x) const;
  Complex db(Complex x) const;
  Complex dc(Complex x) const;
  /// Discriminant G_θ(x) = b_θ(x)² - a_θ(x)c_θ(x).
  Complex G(Complex x) const;

 private:
  QuarticCurve curve_;
  Complex theta_;
  std::array<Complex, 3> qa_, qb_, qc_;  // coefficients of x², x, 1
};

/// p(θ) = 2θ(θ-3C)² + 2θ(4BD - AE) + 4B²E + 4AD² - 24BCD.
Complex p_theta(const QuarticCurve& c, Complex theta);
/// Coefficients of p(θ), highest power first.
std::array<Complex, 4> p_theta_coefficients(const QuarticCurve& c);

/// Γ: η² = 4ξ³ - g2 ξ - g3.
struct WeierstrassCurve {
  Complex g2, g3;
  Complex rhs(Complex xi) const { return 4.0 * xi * xi * xi - g2 * xi - g3; }
};
WeierstrassCurve weierstrass_invariants(const QuarticCurve& c);

/// θ = 2(ξ + C) links Γ to the pencil.
inline Complex theta_of_xi(const QuarticCurve& c, Complex xi) { return 2.0 * (xi + c.C); }
inline Complex xi_of_theta(const QuarticCurve& c, Complex theta) { return 0.5 * theta - c.C; }

/// Point (x, u) on C: u² = P(x).
struct CPoint {
  Complex x, u;
};

/// Point (ξ, η) on Γ, or the point at infinity.
struct GammaPoint {
  Complex xi, eta;
  bool at_infinity = false;
};

/// |u² - P(x)| / (1 + |P(x)|).
double on_curve_residual(const QuarticCurve& c, const CPoint& p);
double on_curve_residual(const WeierstrassCurve& w, const GammaPoint& p);

/// The θ values of the two pencil members through (a, b):
/// θ = (R(a, b) ± √(P(a)P(b))) / (a - b)², + first.
std::array<Complex, 2> theta_through(const QuarticCurve& c, Complex a, Complex b);

/// Roots y of Φ_θ(x, y) = 0: y = (-b_θ(x) + σ√G_θ(x)) / a_θ(x).
Complex euler_root(const ThetaFamily& fam, Complex x, int sigma);

struct EulerSlopeReport {
  Complex y;
  Complex slope;  // dy/dx by implicit differentiation of Φ_θ
  int rho = 1;    // sign with slope = -ρ √P(y) / (σ √P(x)) for principal roots
  double residual = 0;  // relative mismatch for the best ρ
};

/// Checks that y(x) from Φ_θ(x, y) = 0 has slope ∓√(P(y)/P(x)) at x0 on branch σ. Throws DegeneratePointError when
/// a_θ(x0) or G_θ(x0) vanishes.
EulerSlopeReport euler_solution_check(const ThetaFamily& fam, Complex x0, int sigma);

/// N with N - M = O. Throws DegeneratePointError at η = 0, O at infinity,
/// or a_θ(x) = 0.
CPoint weil_add(const QuarticCurve& c, const GammaPoint& o, const CPoint& m);
/// N with N + M = O.
CPoint weil_sub(const QuarticCurve& c, const GammaPoint& o, const CPoint& m);

/// Γ-points O = N - M and O' = N + M of two C-points.
struct GammaPair {
  GammaPoint difference;  // O
  GammaPoint sum;         // O'
};
GammaPair gamma_points(const QuarticCurve& c, const CPoint& m, const CPoint& n);

/// θ' limit -Q(x) / (2P(x)) of the sum as N tends to M.
Complex coincident_sum_theta(const QuarticCurve& c, Complex x);

struct DifferentialCheck {
  Complex dxi_fd, dxi_expected;    // along O = N - M
  Complex dxip_fd, dxip_expected;  // along O' = N + M
  double error_xi = 0, error_xip = 0;
};

/// Centered differences of ξ and ξ' along x(s) = x + s·dx, y(s) = y + s·dy,
/// with u, v continued along the path, compared with
/// η(-dx/u + dy/v) and η'(dx/u + dy/v).
DifferentialCheck differential_relations_check(const QuarticCurve& c, const CPoint& m, const CPoint& n,
                                               Complex dx, Complex dy, double h);

}  // namespace etop::elliptic
