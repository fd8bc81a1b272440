#include "elastic_tops/elliptic.hpp"

#include <cmath>
#include <stdexcept>

namespace etop::elliptic {

namespace {

Complex quad(const std::array<Complex, 3>& q, Complex x) { return (q[0] * x + q[1]) * x + q[2]; }
Complex dquad(const std::array<Complex, 3>& q, Complex x) { return 2.0 * q[0] * x + q[1]; }

bool is_zero(Complex z, double scale) { return std::abs(z) <= 1e-14 * (1.0 + scale); }

}  // namespace

void QuarticCurve::validate() const {
  if (A == 0.0 && B == 0.0 && C == 0.0 && D == 0.0 && E == 0.0) {
    throw std::invalid_argument("quartic has all coefficients zero");
  }
}

Complex QuarticCurve::P(Complex x) const { return (((E * x + 4.0 * D) * x + 6.0 * C) * x + 4.0 * B) * x + A; }

Complex QuarticCurve::dP(Complex x) const { return ((4.0 * E * x + 12.0 * D) * x + 12.0 * C) * x + 4.0 * B; }

Complex QuarticCurve::R(Complex x, Complex y) const {
  return A + 2.0 * B * (x + y) + 3.0 * C * (x * x + y * y) + 2.0 * D * x * y * (x + y) + E * x * x * y * y;
}

RhatCoefficients rhat_coefficients(const QuarticCurve& c) {
  RhatCoefficients r;
  r.alpha = -4.0 * c.B * c.B;
  r.beta = 2.0 * (c.A * c.D - 3.0 * c.B * c.C);
  r.gamma3 = 2.0 * (c.A * c.E + 2.0 * c.B * c.D - 9.0 * c.C * c.C);
  r.delta = 2.0 * (c.B * c.E - 3.0 * c.C * c.D);
  r.epsilon = -4.0 * c.D * c.D;
  r.zeta = c.A * c.E + 4.0 * c.B * c.D - 9.0 * c.C * c.C;
  return r;
}

Complex QuarticCurve::Rhat(Complex x, Complex y) const {
  const RhatCoefficients r = rhat_coefficients(*this);
  const Complex d = x - y;
  return r.alpha + 2.0 * r.beta * (x + y) + r.gamma3 * (x * x + y * y) + 2.0 * r.delta * x * y * (x + y) +
         r.epsilon * x * x * y * y - r.zeta * d * d;
}

Complex QuarticCurve::Q_from_derivatives(Complex x) const {
  const Complex rxy = 8.0 * D * x + 4.0 * E * x * x;
  const Complex dp = dP(x);
  return P(x) * rxy - 0.25 * dp * dp;
}

ThetaFamily::ThetaFamily(const QuarticCurve& curve, Complex theta) : curve_(curve), theta_(theta) {
  const RhatCoefficients r = rhat_coefficients(curve);
  const Complex t = theta;
  const Complex mid = 6.0 * curve.C * t + r.gamma3 - (t * t + r.zeta);
  qa_ = {2.0 * curve.E * t + r.epsilon, 4.0 * curve.D * t + 2.0 * r.delta, mid};
  qb_ = {2.0 * curve.D * t + r.delta, t * t + r.zeta, 2.0 * curve.B * t + r.beta};
  qc_ = {mid, 4.0 * curve.B * t + 2.0 * r.beta, 2.0 * curve.A * t + r.alpha};
}

Complex ThetaFamily::R_theta(Complex x, Complex y) const {
  const Complex d = x - y;
  return curve_.R(x, y) - theta_ * d * d;
}

Complex ThetaFamily::Phi(Complex x, Complex y) const {
  const Complex d = x - y;
  return -d * d * theta_ * theta_ + 2.0 * curve_.R(x, y) * theta_ + curve_.Rhat(x, y);
}

Complex ThetaFamily::a(Complex x) const { return quad(qa_, x); }
Complex ThetaFamily::b(Complex x) const { return quad(qb_, x); }
Complex ThetaFamily::c(Complex x) const { return quad(qc_, x); }
Complex ThetaFamily::da(Complex x) const { return dquad(qa_, x); }
Complex ThetaFamily::db(Complex x) const { return dquad(qb_, x); }
Complex ThetaFamily::dc(Complex x) const { return dquad(qc_, x); }

Complex ThetaFamily::G(Complex x) const {
  const Complex bx = b(x);
  return bx * bx - a(x) * c(x);
}

std::array<Complex, 4> p_theta_coefficients(const QuarticCurve& c) {
  const Complex C = c.C;
  return {2.0, -12.0 * C, 18.0 * C * C + 2.0 * (4.0 * c.B * c.D - c.A * c.E),
          4.0 * c.B * c.B * c.E + 4.0 * c.A * c.D * c.D - 24.0 * c.B * C * c.D};
}

Complex p_theta(const QuarticCurve& c, Complex theta) {
  const Complex s = theta - 3.0 * c.C;
  return 2.0 * theta * s * s + 2.0 * theta * (4.0 * c.B * c.D - c.A * c.E) + 4.0 * c.B * c.B * c.E +
         4.0 * c.A * c.D * c.D - 24.0 * c.B * c.C * c.D;
}

WeierstrassCurve weierstrass_invariants(const QuarticCurve& c) {
  WeierstrassCurve w;
  w.g2 = c.A * c.E - 4.0 * c.B * c.D + 3.0 * c.C * c.C;
  w.g3 = c.A * c.C * c.E + 2.0 * c.B * c.C * c.D - c.A * c.D * c.D - c.B * c.B * c.E - c.C * c.C * c.C;
  return w;
}

double on_curve_residual(const QuarticCurve& c, const CPoint& p) {
  const Complex px = c.P(p.x);
  return std::abs(p.u * p.u - px) / (1.0 + std::abs(px));
}

double on_curve_residual(const WeierstrassCurve& w, const GammaPoint& p) {
  if (p.at_infinity) return 0.0;
  const Complex r = w.rhs(p.xi);
  return std::abs(p.eta * p.eta - r) / (1.0 + std::abs(r));
}

std::array<Complex, 2> theta_through(const QuarticCurve& c, Complex a, Complex b) {
  const Complex d = a - b;
  if (is_zero(d, std::abs(a))) throw DegeneratePointError("theta_through needs distinct abscissae");
  const Complex root = std::sqrt(c.P(a) * c.P(b));
  const Complex r = c.R(a, b);
  return {(r + root) / (d * d), (r - root) / (d * d)};
}

Complex euler_root(const ThetaFamily& fam, Complex x, int sigma) {
  const Complex ax = fam.a(x);
  if (is_zero(ax, std::abs(fam.b(x)) + std::abs(fam.c(x)))) {
    throw DegeneratePointError("a_theta(x) vanishes");
  }
  return (-fam.b(x) + double(sigma) * std::sqrt(fam.G(x))) / ax;
}

EulerSlopeReport euler_solution_check(const ThetaFamily& fam, Complex x0, int sigma) {
  if (sigma != 1 && sigma != -1) throw std::invalid_argument("sigma must be +1 or -1");
  const Complex g = fam.G(x0);
  if (is_zero(g, std::norm(fam.b(x0)))) throw DegeneratePointError("double root: G_theta(x) vanishes");
  EulerSlopeReport rep;
  rep.y = euler_root(fam, x0, sigma);
  const Complex y = rep.y;
  const Complex phi_x = fam.da(x0) * y * y + 2.0 * fam.db(x0) * y + fam.dc(x0);
  const Complex phi_y = 2.0 * (fam.a(x0) * y + fam.b(x0));
  rep.slope = -phi_x / phi_y;
  const QuarticCurve& c = fam.curve();
  const Complex base = std::sqrt(c.P(y)) / (double(sigma) * std::sqrt(c.P(x0)));
  const double scale = 1.0 + std::abs(rep.slope);
  const double plus = std::abs(rep.slope + base) / scale;
  const double minus = std::abs(rep.slope - base) / scale;
  rep.rho = plus <= minus ? 1 : -1;
  rep.residual = std::min(plus, minus);
  return rep;
}

CPoint weil_add(const QuarticCurve& c, const GammaPoint& o, const CPoint& m) {
  if (o.at_infinity) throw DegeneratePointError("Gamma point at infinity");
  if (is_zero(o.eta, std::abs(o.xi))) throw DegeneratePointError("eta = 0 (2-torsion point)");
  const ThetaFamily fam(c, theta_of_xi(c, o.xi));
  const Complex ax = fam.a(m.x);
  if (is_zero(ax, std::abs(fam.b(m.x)))) throw DegeneratePointError("a_theta(x) vanishes");
  const Complex y = (-fam.b(m.x) + 2.0 * o.eta * m.u) / ax;
  const Complex v = -(m.x * fam.a(y) + fam.b(y)) / (2.0 * o.eta);
  return {y, v};
}

CPoint weil_sub(const QuarticCurve& c, const GammaPoint& o, const CPoint& m) {
  return weil_add(c, o, CPoint{m.x, -m.u});
}

GammaPair gamma_points(const QuarticCurve& c, const CPoint& m, const CPoint& n) {
  const Complex d = m.x - n.x;
  if (is_zero(d, std::abs(m.x))) throw DegeneratePointError("coincident abscissae: O is at infinity");
  if (is_zero(n.u, std::abs(n.x))) throw DegeneratePointError("v = 0 at N");
  const Complex r = c.R(m.x, n.x);
  const Complex uv = m.u * n.u;
  auto point = [&](Complex theta) {
    const ThetaFamily fam(c, theta);
    const Complex eta = -(m.x * fam.a(n.x) + fam.b(n.x)) / (2.0 * n.u);
    return GammaPoint{xi_of_theta(c, theta), eta, false};
  };
  return {point((r + uv) / (d * d)), point((r - uv) / (d * d))};
}

Complex coincident_sum_theta(const QuarticCurve& c, Complex x) {
  const Complex px = c.P(x);
  if (is_zero(px, 0.0)) throw DegeneratePointError("P(x) = 0");
  return -c.Q(x) / (2.0 * px);
}

DifferentialCheck differential_relations_check(const QuarticCurve& c, const CPoint& m, const CPoint& n,
                                               Complex dx, Complex dy, double h) {
  auto at = [&](double s) {
    const Complex x = m.x + s * dx;
    const Complex y = n.x + s * dy;
    const CPoint ms{x, continue_sqrt(c.P(x), m.u)};
    const CPoint ns{y, continue_sqrt(c.P(y), n.u)};
    return gamma_points(c, ms, ns);
  };
  const GammaPair g0 = gamma_points(c, m, n);
  const GammaPair gp = at(h);
  const GammaPair gm = at(-h);
  DifferentialCheck out;
  out.dxi_fd = (gp.difference.xi - gm.difference.xi) / (2.0 * h);
  out.dxip_fd = (gp.sum.xi - gm.sum.xi) / (2.0 * h);
  out.dxi_expected = g0.difference.eta * (-dx / m.u + dy / n.u);
  out.dxip_expected = g0.sum.eta * (dx / m.u + dy / n.u);
  out.error_xi = std::abs(out.dxi_fd - out.dxi_expected);
  out.error_xip = std::abs(out.dxip_fd - out.dxip_expected);
  return out;
}

}  // namespace etop::elliptic
