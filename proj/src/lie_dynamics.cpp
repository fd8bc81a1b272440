#include "elastic_tops/lie_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace etop::lie {

namespace {

bool finite(double v) { return std::isfinite(v); }

int levi_civita(int i, int j, int l) {
  if (i == j || j == l || i == l) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

}  // namespace

void ModelParams::validate() const {
  for (double v : {c1, c2, c3, a1, a2, a3}) {
    if (!finite(v)) throw std::invalid_argument("model parameters must be finite");
  }
  const bool need12 = mode != InertiaMode::AxisymmetricInfinite;
  const bool need3 = mode != InertiaMode::ThirdInfinite;
  if ((need12 && (c1 <= 0 || c2 <= 0)) || (need3 && c3 <= 0)) {
    throw std::invalid_argument("inertia coefficients must be positive");
  }
  curvature_from_int(kv());
}

Vec3 ModelParams::inverse_inertia() const {
  switch (mode) {
    case InertiaMode::AxisymmetricInfinite:
      return {0.0, 0.0, 1.0 / c3};
    case InertiaMode::ThirdInfinite:
      return {1.0 / c1, 1.0 / c2, 0.0};
    case InertiaMode::Finite:
      break;
  }
  return {1.0 / c1, 1.0 / c2, 1.0 / c3};
}

bool ModelParams::is_kowalewski(double tol) const {
  if (mode != InertiaMode::Finite) return false;
  const double scale = std::max({c1, c2, c3});
  return std::abs(c1 - 2 * c3) <= tol * scale && std::abs(c2 - 2 * c3) <= tol * scale &&
         std::abs(a3) <= tol * std::max(1.0, std::hypot(a1, a2));
}

State make_state(const Vec3& h, const Vec3& H) { return {h, H}; }

// ---- Lie algebra ----------------------------------------------------------

std::array<IntMat4, 6> basis_matrices(int k) {
  curvature_from_int(k);
  std::array<IntMat4, 6> b;
  for (auto& m : b) m.setZero();
  for (int i = 0; i < 3; ++i) {
    b[i](0, i + 1) = -k;
    b[i](i + 1, 0) = 1;
  }
  // A_i generates rotations about axis i acting on coordinates 1..3.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int l = 0; l < 3; ++l) b[3 + i](j + 1, l + 1) = levi_civita(i, l, j);
    }
  }
  return b;
}

std::array<int, 6> bracket_table_entry(int k, std::size_t i, std::size_t j) {
  if (i >= 6 || j >= 6) throw std::out_of_range("basis index");
  std::array<int, 6> out{};
  const int a = static_cast<int>(i % 3);
  const int b = static_cast<int>(j % 3);
  const bool xi_rot = i >= 3;
  const bool yj_rot = j >= 3;
  for (int l = 0; l < 3; ++l) {
    const int e = -levi_civita(a, b, l);
    if (e == 0) continue;
    if (xi_rot && yj_rot) {
      out[3 + l] = e;
    } else if (xi_rot != yj_rot) {
      out[l] = e;
    } else {
      out[3 + l] = k * e;
    }
  }
  return out;
}

IntMat4 combine(const std::array<IntMat4, 6>& basis, const std::array<int, 6>& coeffs) {
  IntMat4 m = IntMat4::Zero();
  for (std::size_t i = 0; i < 6; ++i) m += coeffs[i] * basis[i];
  return m;
}

int bracket_table_mismatches(int k) {
  const auto b = basis_matrices(k);
  int bad = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (bracket(b[i], b[j]) != combine(b, bracket_table_entry(k, i, j))) ++bad;
    }
  }
  return bad;
}

// ---- invariants -----------------------------------------------------------

Complex kowalewski_q(const State& p, const ModelParams& params) {
  const Complex z{0.5 * p.H(0), 0.5 * p.H(1)};
  const Complex w{p.h(0), p.h(1)};
  const Complex A = params.c3 * Complex{params.a1, params.a2};
  return z * z - A * (w - double(params.kv()) * A);
}

Invariants conserved_quantities(const State& p, const ModelParams& params,
                                const std::optional<Mat4>& frame) {
  Invariants inv;
  inv.H = hamiltonian(p, params);
  inv.K2 = p.h.squaredNorm() + params.kv() * p.H.squaredNorm();
  inv.K3 = p.h.dot(p.H);
  if (params.is_kowalewski(1e-12)) inv.K4sq = std::norm(kowalewski_q(p, params));
  if (frame && params.k == Curvature::Flat) inv.F = euclidean_right_integrals(p, *frame, params.k);
  return inv;
}

double kowalewski_q_derivative_residual(const State& p, const ModelParams& params) {
  if (!params.is_kowalewski(1e-12)) {
    throw std::invalid_argument("q-derivative check needs c1 = c2 = 2 c3 and a3 = 0");
  }
  const State d = vector_field(p, params);
  const Complex z{0.5 * p.H(0), 0.5 * p.H(1)};
  const Complex dz{0.5 * d.H(0), 0.5 * d.H(1)};
  const Complex dw{d.h(0), d.h(1)};
  const Complex A = params.c3 * Complex{params.a1, params.a2};
  const Complex dq = 2.0 * z * dz - A * dw;
  const Complex q = kowalewski_q(p, params);
  const Complex expected = Complex{0.0, -p.H(2) / params.c3} * q;
  return std::abs(dq - expected) / (1.0 + std::abs(q));
}

Vec3 euclidean_right_integrals(const State& p, const Mat4& g, Curvature k) {
  if (k != Curvature::Flat) throw std::invalid_argument("right integrals F need k = 0");
  const Mat3 r = g.block<3, 3>(1, 1);
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 rot = svd.matrixU() * svd.matrixV().transpose();
  return rot * p.h;
}

Mat4 lax_matrix(const State& p, int k) {
  const auto& h = p.h;
  const auto& H = p.H;
  Mat4 u;
  u << 0, h(0), h(1), h(2),
       -k * h(0), 0, H(2), -H(1),
       -k * h(1), -H(2), 0, H(0),
       -k * h(2), H(1), -H(0), 0;
  return u;
}

Mat4 hamiltonian_differential(const State& p, const ModelParams& params) {
  const Vec3 om = p.H.cwiseProduct(params.inverse_inertia());
  const Vec3 a = params.a();
  const double k = params.kv();
  Mat4 m;
  m << 0, -k * a(0), -k * a(1), -k * a(2),
       a(0), 0, -om(2), om(1),
       a(1), om(2), 0, -om(0),
       a(2), -om(1), om(0), 0;
  return m;
}

double lax_residual(const State& p, const ModelParams& params) {
  if (params.k == Curvature::Flat) throw std::invalid_argument("Lax identity check needs k = +-1");
  const int k = params.kv();
  const Mat4 u = lax_matrix(p, k);
  const Mat4 dh = hamiltonian_differential(p, params);
  const Mat4 lhs = lax_matrix(vector_field(p, params), k);
  const double scale = 1.0 + u.cwiseAbs().maxCoeff() * dh.cwiseAbs().maxCoeff();
  return (lhs - bracket(dh, u)).cwiseAbs().maxCoeff() / scale;
}

// ---- group frames ---------------------------------------------------------

Mat4 group_metric(int k) {
  Mat4 j = Mat4::Identity();
  if (k == -1) j(0, 0) = -1;
  return j;
}

double group_constraint_error(const Mat4& g, int k) {
  if (k == 0) {
    const Mat3 r = g.block<3, 3>(1, 1);
    const double row = std::abs(g(0, 0) - 1) + g.block<1, 3>(0, 1).cwiseAbs().sum();
    return row + (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  }
  const Mat4 j = group_metric(k);
  return (g.transpose() * j * g - j).cwiseAbs().maxCoeff();
}

Mat4 project_to_group(const Mat4& g, int k) {
  constexpr int kIterations = 3;
  if (k == 0) {
    Mat4 out = g;
    Mat3 r = g.block<3, 3>(1, 1);
    for (int it = 0; it < kIterations; ++it) r = 0.5 * r * (3 * Mat3::Identity() - r.transpose() * r);
    out.block<3, 3>(1, 1) = r;
    out.row(0) << 1, 0, 0, 0;
    return out;
  }
  const Mat4 j = group_metric(k);
  Mat4 out = g;
  for (int it = 0; it < kIterations; ++it) {
    out = 0.5 * out * (3 * Mat4::Identity() - j * out.transpose() * j * out);
  }
  return out;
}

// ---- integration ----------------------------------------------------------

void Trajectory::check() const {
  const std::size_t n = t.size();
  if (states.size() != n || invariants.size() != n || (!frames.empty() && frames.size() != n)) {
    throw std::logic_error("trajectory columns have different lengths");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(t[i] > t[i - 1])) throw std::logic_error("trajectory times must increase strictly");
  }
}

namespace {

using Buffer = std::vector<double>;

State unpack_state(const Buffer& y) {
  State s;
  s.h << y[0], y[1], y[2];
  s.H << y[3], y[4], y[5];
  return s;
}

Mat4 unpack_frame(const Buffer& y) { return Eigen::Map<const Mat4>(y.data() + 6); }

void pack(const State& s, const Mat4* g, Buffer& y) {
  for (int i = 0; i < 3; ++i) {
    y[i] = s.h(i);
    y[3 + i] = s.H(i);
  }
  if (g) Eigen::Map<Mat4>(y.data() + 6) = *g;
}

struct System {
  const ModelParams& params;
  bool with_frame;

  void operator()(const Buffer& y, Buffer& dy, double /*t*/) const {
    const State s = unpack_state(y);
    const State d = vector_field(s, params);
    const Mat4* dg = nullptr;
    Mat4 tmp;
    if (with_frame) {
      tmp = unpack_frame(y) * hamiltonian_differential(s, params);
      dg = &tmp;
    }
    pack(d, dg, dy);
  }
};

}  // namespace

Trajectory integrate(const State& p0, const ModelParams& params, const IntegrateOptions& opts) {
  namespace odeint = boost::numeric::odeint;
  params.validate();
  if (!(opts.tf > opts.t0)) throw std::invalid_argument("integration span must have tf > t0");
  if (opts.output_dt && !(*opts.output_dt > 0)) throw std::invalid_argument("output spacing must be positive");
  const int k = params.kv();
  if (opts.with_frame && group_constraint_error(opts.g0, k) > 1e-8) {
    throw std::invalid_argument("initial frame is not in the group for this curvature");
  }

  const std::size_t dim = opts.with_frame ? 22 : 6;
  Buffer y(dim);
  pack(p0, opts.with_frame ? &opts.g0 : nullptr, y);
  const System sys{params, opts.with_frame};

  Trajectory traj;
  traj.k = params.k;
  auto record = [&](double t, const Buffer& v) {
    const State s = unpack_state(v);
    traj.t.push_back(t);
    traj.states.push_back(s);
    std::optional<Mat4> g;
    if (opts.with_frame) {
      g = unpack_frame(v);
      traj.frames.push_back(*g);
    }
    traj.invariants.push_back(conserved_quantities(s, params, g));
  };

  auto stepper = odeint::make_dense_output(opts.tol.atol, opts.tol.rtol,
                                           odeint::runge_kutta_dopri5<Buffer>());
  const double span = opts.tf - opts.t0;
  stepper.initialize(y, opts.t0, std::min(1e-3, span));
  record(opts.t0, y);

  std::size_t next_out = 1;
  auto out_time = [&](std::size_t i) { return opts.t0 + static_cast<double>(i) * *opts.output_dt; };
  Buffer tmp(dim);
  std::size_t steps = 0;
  double last_good = opts.t0;
  try {
    while (stepper.current_time() < opts.tf) {
      const auto [ta, tb] = stepper.do_step(sys);
      (void)ta;
      if (opts.output_dt) {
        while (next_out < 1'000'000'000 && out_time(next_out) <= std::min(tb, opts.tf) &&
               out_time(next_out) < opts.tf - 1e-12 * span) {
          stepper.calc_state(out_time(next_out), tmp);
          record(out_time(next_out), tmp);
          ++next_out;
        }
      } else if (tb < opts.tf) {
        record(tb, stepper.current_state());
      }
      last_good = std::min(tb, opts.tf);
      if (++steps > opts.max_steps) throw IntegrationFailure("step budget exhausted", last_good);
      if (stepper.current_time_step() < 1e-14 * (1.0 + std::abs(tb))) {
        throw IntegrationFailure("step size underflow", last_good);
      }
      if (opts.with_frame && opts.reproject_every > 0 &&
          steps % static_cast<std::size_t>(opts.reproject_every) == 0 && tb < opts.tf) {
        Buffer cur = stepper.current_state();
        const Mat4 g = project_to_group(unpack_frame(cur), k);
        Eigen::Map<Mat4>(cur.data() + 6) = g;
        stepper.initialize(cur, tb, stepper.current_time_step());
      }
    }
  } catch (const odeint::odeint_error& e) {
    throw IntegrationFailure(e.what(), last_good);
  }
  stepper.calc_state(opts.tf, tmp);
  record(opts.tf, tmp);
  return traj;
}

double Drift::max() const {
  double m = std::max({H, K2, K3});
  if (K4sq) m = std::max(m, *K4sq);
  if (F) m = std::max(m, F->maxCoeff());
  return m;
}

Drift relative_drift(const Trajectory& traj) {
  Drift d;
  if (traj.invariants.empty()) return d;
  const Invariants& q0 = traj.invariants.front();
  auto rel = [](double v, double v0) { return std::abs(v - v0) / std::max(1.0, std::abs(v0)); };
  if (q0.K4sq) d.K4sq = 0.0;
  if (q0.F) d.F = Vec3::Zero();
  for (const Invariants& q : traj.invariants) {
    d.H = std::max(d.H, rel(q.H, q0.H));
    d.K2 = std::max(d.K2, rel(q.K2, q0.K2));
    d.K3 = std::max(d.K3, rel(q.K3, q0.K3));
    if (d.K4sq && q.K4sq) d.K4sq = std::max(*d.K4sq, rel(*q.K4sq, *q0.K4sq));
    if (d.F && q.F) {
      for (int i = 0; i < 3; ++i) (*d.F)(i) = std::max((*d.F)(i), rel((*q.F)(i), (*q0.F)(i)));
    }
  }
  return d;
}

// ---- limiting system ------------------------------------------------------

namespace {

void require_m0(const ModelParams& params) {
  if (params.mode != InertiaMode::AxisymmetricInfinite) {
    throw std::invalid_argument("limiting field needs the c1 = c2 = infinity mode");
  }
  if (params.a3 != 0.0) throw std::invalid_argument("limiting field needs a3 = 0");
}

Complex m0_offset(const State& p, const ModelParams& params) {
  return Complex{p.h(0), p.h(1)} - double(params.kv()) * params.c3 * Complex{params.a1, params.a2};
}

}  // namespace

State limiting_m0_field(const State& p, const ModelParams& params) {
  require_m0(params);
  return vector_field(p, params);
}

double m0_modulus(const State& p, const ModelParams& params) {
  require_m0(params);
  return std::norm(m0_offset(p, params));
}

double m0_pendulum_residual(const State& p, const ModelParams& params, double energy) {
  require_m0(params);
  const State d = limiting_m0_field(p, params);
  const Complex off = m0_offset(p, params);
  const double r = std::abs(off);
  const double theta = std::arg(off);
  const double theta_dot = (Complex{d.h(0), d.h(1)} / off).imag();
  const double a_sq = params.a1 * params.a1 + params.a2 * params.a2;
  const double potential =
      params.kv() * params.c3 * a_sq + r * (params.a1 * std::cos(theta) + params.a2 * std::sin(theta));
  const double lhs = 0.5 * params.c3 * theta_dot * theta_dot;
  return std::abs(lhs - (energy - potential)) / (1.0 + std::abs(energy) + std::abs(potential));
}

}  // namespace etop::lie
