#include "elastic_tops/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace etop::quadrature {

using reduction::ReducedConstants;
using reduction::ReducedState;

QuadratureConstants make_quadrature_constants(const ReducedConstants& c) {
  const auto w = elliptic::weierstrass_invariants(reduction::quartic_P(c));
  QuadratureConstants q;
  const double centre = c.H / 6.0 - c.k / 2.0;
  q.k1 = centre + 0.5 * c.K4();
  q.k2 = centre - 0.5 * c.K4();
  q.g2 = w.g2.real();
  q.g3 = w.g3.real();
  return q;
}

XiPair xi_from_state(const ReducedState& s, const ReducedConstants& c) {
  const Complex xb = std::conj(s.x);
  const Complex d = s.x - xb;
  if (std::abs(d) <= 1e-12 * (1.0 + std::abs(s.x))) {
    throw DegeneratePointError("x is real: the two separation variables coalesce");
  }
  const auto P = reduction::quartic_P(c);
  const Complex u = std::sqrt(P.P(s.x));
  const Complex v = std::conj(u);
  const Complex r0 = reduction::form_R0(s.x, xb, c);
  const double shift = c.H / 6.0 - c.k / 2.0;
  XiPair out;
  out.uv = u * v;
  // (r0 - uv)(r0 + uv) = -d² Φ_θ(x, x̄); take the smaller factor from the product
  // so that it does not suffer cancellation when ξ2 is large.
  const Complex phi = reduction::form_R1(s.x, xb, c);
  Complex minus = r0 - out.uv, plus = r0 + out.uv;
  if (std::abs(plus) >= std::abs(minus)) {
    minus = -d * d * phi / plus;
  } else {
    plus = -d * d * phi / minus;
  }
  out.xi1 = minus / (2.0 * d * d) + shift;
  out.xi2 = plus / (2.0 * d * d) + shift;
  const auto w = elliptic::weierstrass_invariants(P);
  out.eta1 = std::sqrt(w.rhs(out.xi1));
  out.eta2 = std::sqrt(w.rhs(out.xi2));
  return out;
}

std::array<Complex, 2> classical_s_variables(Complex x, Complex y, Complex uv, const ReducedConstants& c) {
  const auto P = reduction::quartic_P(c);
  const Complex d = x - y;
  const Complex base = P.R(x, y) - c.H * d * d;
  return {(base - uv) / (2.0 * d * d) + c.H / 6.0, (base + uv) / (2.0 * d * d) + c.H / 6.0};
}

namespace {

// Multiplies polynomials given highest degree first.
std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

Quintic::Quintic(const QuadratureConstants& q) : q_(q) {
  auto p = multiply({-4.0, 0.0, q.g2, q.g3}, {1.0, -q.k1});
  p = multiply(p, {1.0, -q.k2});
  for (std::size_t i = 0; i < 6; ++i) coeffs_[i] = p[i];
}

Complex Quintic::operator()(Complex xi) const {
  Complex acc = 0.0;
  for (double c : coeffs_) acc = acc * xi + c;
  return acc;
}

Complex Quintic::factored(Complex xi) const {
  return -(4.0 * xi * xi * xi - q_.g2 * xi - q_.g3) * (xi - q_.k1) * (xi - q_.k2);
}

QuadratureReport quadrature_residual(const lie::Trajectory& traj, const lie::ModelParams& params,
                                     const QuadratureOptions& opts) {
  traj.check();
  QuadratureReport rep;
  const std::size_t n = traj.size();
  if (n < 5) throw std::invalid_argument("quadrature check needs at least five samples");
  const double dt = traj.t[1] - traj.t[0];
  for (std::size_t i = 2; i < n; ++i) {
    if (std::abs(traj.t[i] - traj.t[i - 1] - dt) > 1e-9 * dt) {
      throw std::invalid_argument("quadrature check needs a uniform time grid");
    }
  }

  const double tscale = reduction::rescale(traj.states.front(), params).time_scale;

  // U is evaluated with each sample's own constants. Near a turning point U(ξᵢ) is
  // set by ξᵢ - kᵢ, and the invariant drift would otherwise dominate that difference.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> xi1(n, nan), xi2(n, nan);
  std::vector<Complex> U1(n), U2(n);
  std::vector<char> ok(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [s, consts, scale, a_eff] = reduction::rescale(traj.states[i], params);
    if (std::abs(s.x - std::conj(s.x)) < opts.coalescence_window * (1.0 + std::abs(s.x))) continue;
    const XiPair xp = xi_from_state(s, consts);
    const Quintic U(make_quadrature_constants(consts));
    xi1[i] = xp.xi1.real();
    xi2[i] = xp.xi2.real();
    U1[i] = U(xi1[i]);
    U2[i] = U(xi2[i]);
    ok[i] = 1;
    const Complex d = s.x - std::conj(s.x);
    rep.max_difference_identity = std::max(
        rep.max_difference_identity, std::abs((xp.xi2 - xp.xi1) * d * d - xp.uv) / (1.0 + std::abs(xp.uv)));
  }

  // A sample is usable when its whole five-point stencil is.
  std::vector<char> usable(n, 0);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    usable[i] = ok[i - 2] && ok[i - 1] && ok[i] && ok[i + 1] && ok[i + 2];
  }
  bool in_gap = false;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (!usable[i]) {
      ++rep.excluded_samples;
      if (!in_gap) ++rep.excluded_windows;
    }
    in_gap = !usable[i];
  }

  auto deriv = [&](const std::vector<double>& f, std::size_t i) {
    return (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * dt) / tscale;
  };

  struct Sample {
    double a, b;  // cleared summands of the differential sum
    int s1, s2;
  };
  std::vector<Sample> segment;
  auto close_segment = [&]() {
    if (segment.empty()) return;
    double best = std::numeric_limits<double>::infinity();
    int best_rho = 1;
    for (int rho : {1, -1}) {
      double worst = 0;
      for (const Sample& s : segment) {
        worst = std::max(worst, std::abs(s.a + rho * s.b) / (1.0 + std::abs(s.a) + std::abs(s.b)));
      }
      if (worst < best) {
        best = worst;
        best_rho = rho;
      }
    }
    rep.rho.push_back(best_rho);
    rep.max_residual_sum = std::max(rep.max_residual_sum, best);
    segment.clear();
  };

  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (!usable[i]) {
      close_segment();
      continue;
    }
    ++rep.samples_used;
    const double d1 = deriv(xi1, i);
    const double d2 = deriv(xi2, i);
    const double gap = xi1[i] - xi2[i];
    const Complex u1 = U1[i];
    const Complex u2 = U2[i];
    const std::array<double, 2> dd{d1, d2};
    const std::array<Complex, 2> uu{u1, u2};
    for (int j = 0; j < 2; ++j) {
      const double lhs = dd[j] * dd[j] * gap * gap;
      const double r = std::abs(lhs - uu[j]) / (1.0 + std::abs(lhs) + std::abs(uu[j]));
      rep.max_residual_sq[j] = std::max(rep.max_residual_sq[j], r);
    }
    // U is non-negative along real motions; clip rounding below zero.
    const double r1 = std::sqrt(std::max(0.0, u1.real()));
    const double r2 = std::sqrt(std::max(0.0, u2.real()));
    const Sample s{d1 * gap * r2, d2 * gap * r1, d1 >= 0 ? 1 : -1, d2 >= 0 ? 1 : -1};
    if (!segment.empty() && (segment.back().s1 != s.s1 || segment.back().s2 != s.s2)) {
      ++rep.seam_count;
      close_segment();
    }
    segment.push_back(s);
  }
  close_segment();
  return rep;
}

}  // namespace etop::quadrature
