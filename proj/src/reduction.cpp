#include "elastic_tops/reduction.hpp"

#include <stdexcept>

namespace etop::reduction {

std::string to_string(K2Convention c) {
  switch (c) {
    case K2Convention::Consistent:
      return "consistent";
    case K2Convention::DropCurvature:
      return "drop-curvature";
    case K2Convention::DropK4:
      return "drop-k4";
  }
  return "unknown";
}

ReducedConstants make_constants(double H, double K2, double K3, double K4sq, int k, K2Convention conv) {
  ReducedConstants c;
  c.H = H;
  c.K2 = K2;
  c.K3 = K3;
  c.K4sq = K4sq;
  c.k = k;
  c.convention = conv;
  c.Htilde = 2 * H - 2 * k;
  const double base = K2 - k * c.Htilde;
  switch (conv) {
    case K2Convention::Consistent:
      c.K2tilde = base - k * k - K4sq;
      break;
    case K2Convention::DropCurvature:
      c.K2tilde = base - K4sq;
      break;
    case K2Convention::DropK4:
      c.K2tilde = base - k * k;
      break;
  }
  return c;
}

ReducedConstants constants_of(const ReducedState& s, K2Convention conv) {
  const int k = s.k;
  const double H = (std::norm(s.x) + 0.5 * (s.x3 * s.x3) + s.y).real();
  const double K2 = (std::norm(s.y) + s.y3 * s.y3 + double(k) * (4.0 * std::norm(s.x) + s.x3 * s.x3)).real();
  const double K3 = (2.0 * (s.x * std::conj(s.y)).real() + s.x3 * s.y3).real();
  return make_constants(H, K2, K3, std::norm(s.q()), k, conv);
}

namespace {

Complex kowalewski_a(const lie::ModelParams& params) {
  if (!params.is_kowalewski(1e-12)) {
    throw std::invalid_argument("reduction needs c1 = c2 = 2 c3 and a3 = 0");
  }
  const Complex a = params.c3 * Complex{params.a1, params.a2};
  if (std::abs(a) == 0.0) throw std::invalid_argument("reduction needs a1 + i a2 != 0");
  return a;
}

ReducedState to_reduced(const lie::State& p, Complex a, int k) {
  const double n = std::norm(a);
  const double m = std::sqrt(n);
  ReducedState s;
  s.x = std::conj(a) * Complex{0.5 * p.H(0), 0.5 * p.H(1)} / n;
  s.y = std::conj(a) * Complex{p.h(0), p.h(1)} / n;
  s.x3 = p.H(2) / m;
  s.y3 = p.h(2) / m;
  s.k = k;
  return s;
}

}  // namespace

Rescaled rescale(const lie::State& p, const lie::ModelParams& params, K2Convention conv) {
  const Complex a = kowalewski_a(params);
  Rescaled r;
  r.a_eff = a;
  r.state = to_reduced(p, a, params.kv());
  r.consts = constants_of(r.state, conv);
  r.time_scale = std::hypot(params.a1, params.a2);
  return r;
}

lie::State unrescale(const ReducedState& s, const lie::ModelParams& params) {
  const Complex a = kowalewski_a(params);
  const double m = std::abs(a);
  const Complex z = a * s.x;
  const Complex w = a * s.y;
  lie::State p;
  p.H << 2.0 * z.real(), 2.0 * z.imag(), m * s.x3.real();
  p.h << w.real(), w.imag(), m * s.y3.real();
  return p;
}

ReducedState reduced_field(const ReducedState& s) {
  const double k = s.k;
  const Complex I{0.0, 1.0};
  ReducedState d;
  d.k = s.k;
  d.x = -0.5 * I * (s.x3 * s.x - s.y3);
  d.y = I * (s.y3 * s.x - s.x3 * s.y + k * s.x3);
  d.x3 = -s.y.imag();
  d.y3 = (s.x * std::conj(s.y)).imag() + 2.0 * k * std::conj(s.x).imag();
  return d;
}

ReducedState pushed_forward_field(const lie::State& p, const lie::ModelParams& params) {
  const Complex a = kowalewski_a(params);
  const lie::State d = lie::vector_field(p, params);
  ReducedState r = to_reduced(d, a, params.kv());
  const double scale = std::hypot(params.a1, params.a2);
  r.x /= scale;
  r.y /= scale;
  r.x3 /= scale;
  r.y3 /= scale;
  return r;
}

ReducedState involution(const ReducedState& s) {
  return {std::conj(s.x), std::conj(s.y), -s.x3, -s.y3, s.k};
}

elliptic::QuarticCurve quartic_P(const ReducedConstants& c) {
  return {c.K2tilde, -0.5 * c.K3, c.H / 3.0, 0.0, -1.0};
}

Complex form_R0(Complex x, Complex y, const ReducedConstants& c) {
  return elliptic::ThetaFamily(quartic_P(c), c.H - c.k).R_theta(x, y);
}

Complex form_R1(Complex x, Complex y, const ReducedConstants& c) {
  return elliptic::ThetaFamily(quartic_P(c), c.H - c.k).Phi(x, y);
}

Complex form_R1_expanded_variant(Complex x, Complex y, const ReducedConstants& c) {
  const double k = c.k;
  const double Ht = c.Htilde;
  const Complex s = x + y;
  const Complex d = x - y;
  const Complex p = x * y;
  return (Ht * c.K2tilde - c.K3 * c.K3) + 2.0 * c.K3 * k * s + (2 * Ht * k - 3 * c.K2) * (x * x + y * y) +
         2.0 * c.K3 * p * s - Ht * p * p + (Ht * k - 2 * c.K2) * d * d;
}

double variety_residual(const ReducedState& s, const ReducedConstants& c) {
  const auto P = quartic_P(c);
  const Complex xb = std::conj(s.x);
  const Complex q = s.q();
  const Complex d = s.x - xb;
  const Complex t1 = P.P(s.x) * std::conj(q);
  const Complex t2 = P.P(xb) * q;
  const Complex t3 = form_R1(s.x, xb, c);
  const Complex t4 = c.K4sq * d * d;
  const double scale = 1.0 + std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
  return std::abs(t1 + t2 + t3 + t4) / scale;
}

Complex QRoots::nearest(Complex guess) const {
  if (degenerate) return first;
  return std::abs(first - guess) <= std::abs(second - guess) ? first : second;
}

QRoots solve_q(Complex x, const ReducedConstants& c) {
  const auto P = quartic_P(c);
  const Complex xb = std::conj(x);
  const Complex d = x - xb;
  const Complex qa = P.P(xb);
  const Complex qb = form_R1(x, xb, c) + c.K4sq * d * d;
  const Complex qc = c.K4sq * P.P(x);
  QRoots r;
  if (std::abs(qa) <= 1e-14 * (1.0 + std::abs(qb) + std::abs(qc))) {
    if (std::abs(qb) == 0.0) throw DegeneratePointError("q equation degenerates completely");
    r.first = r.second = -qc / qb;
    r.degenerate = true;
    return r;
  }
  const Complex disc = std::sqrt(qb * qb - 4.0 * qa * qc);
  // Pick the numerically stable pairing of the quadratic formula.
  const Complex big = std::abs(-qb + disc) >= std::abs(-qb - disc) ? -qb + disc : -qb - disc;
  if (std::abs(big) == 0.0) {
    r.first = r.second = 0.0;
    return r;
  }
  r.first = big / (2.0 * qa);
  r.second = 2.0 * qc / big;
  return r;
}

double extremal_ode_residual(const ReducedState& s, const ReducedConstants& c, Complex dxdt) {
  const auto P = quartic_P(c);
  const Complex d = s.x - std::conj(s.x);
  const Complex lhs = -4.0 * dxdt * dxdt;
  const Complex px = P.P(s.x);
  const Complex qd = s.q() * d * d;
  return std::abs(lhs - px - qd) / (1.0 + std::abs(lhs) + std::abs(px) + std::abs(qd));
}

double zeta_residual(const ReducedState& s, const ReducedConstants& c) {
  const Complex zeta = s.x3 * s.x - s.y3;
  const Complex zz = zeta * std::conj(zeta);
  const Complex r0 = form_R0(s.x, std::conj(s.x), c);
  return std::abs(zz - r0) / (1.0 + std::abs(zz) + std::abs(r0));
}

X3Y3 recover_x3_y3(const ReducedState& s, const ReducedConstants& c) {
  const Complex x = s.x;
  const Complex xb = std::conj(x);
  const Complex q = s.q();
  const Complex qb = std::conj(q);
  const Complex sum = x + xb;
  X3Y3 r;
  r.x3sq = c.Htilde - sum * sum + (q + qb);
  r.y3sq = c.K2tilde - x * x * xb * xb + x * x * qb + xb * xb * q - 2.0 * double(c.k) * x * xb;
  return r;
}

double product_identity_residual(const X3Y3& r, const ReducedState& s, const ReducedConstants& c) {
  const Complex x = s.x;
  const Complex xb = std::conj(x);
  const Complex q = s.q();
  const Complex inner = c.K3 - (x * xb + double(c.k)) * (x + xb) + (x * std::conj(q) + xb * q);
  const Complex lhs = r.x3sq * r.y3sq;
  const Complex rhs = inner * inner;
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
}

void ResidualStats::add(double v) {
  max = std::max(max, v);
  mean += v;
  ++count;
}

void ResidualStats::finish() {
  if (count > 0) mean /= static_cast<double>(count);
}

ReductionReport reduction_report(const lie::Trajectory& traj, const lie::ModelParams& params,
                                 K2Convention conv) {
  ReductionReport rep;
  if (traj.size() == 0) return rep;
  rep.consts = rescale(traj.states.front(), params, conv).consts;
  const ReducedConstants& c = rep.consts;
  for (const lie::State& p : traj.states) {
    const ReducedState s = rescale(p, params, conv).state;
    rep.variety.add(variety_residual(s, c));
    rep.extremal_ode.add(extremal_ode_residual(s, c, reduced_field(s).x));
    rep.zeta.add(zeta_residual(s, c));
    const X3Y3 r = recover_x3_y3(s, c);
    rep.product.add(product_identity_residual(r, s, c));
    const Complex x3sq = s.x3 * s.x3;
    const Complex y3sq = s.y3 * s.y3;
    const double xs = 1.0 + std::abs(c.Htilde) + std::norm(s.x + std::conj(s.x)) + 2.0 * std::abs(s.q());
    const double ys = 1.0 + std::abs(c.K2tilde) + std::norm(s.x) * (std::norm(s.x) + 2.0 * std::abs(s.q()) + 2.0);
    rep.x3_recovery.add(std::abs(r.x3sq - x3sq) / xs);
    rep.y3_recovery.add(std::abs(r.y3sq - y3sq) / ys);
    const Complex q = s.q();
    const QRoots roots = solve_q(s.x, c);
    const double miss = std::abs(roots.nearest(q) - q);
    rep.q_root.add(miss / (1.0 + std::abs(q)));
  }
  for (ResidualStats* st : {&rep.variety, &rep.extremal_ode, &rep.zeta, &rep.product, &rep.x3_recovery,
                            &rep.y3_recovery, &rep.q_root}) {
    st->finish();
  }
  return rep;
}

}  // namespace etop::reduction
