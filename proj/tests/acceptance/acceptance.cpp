// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "elastic_tops/elliptic.hpp"
#include "elastic_tops/lie_dynamics.hpp"
#include "elastic_tops/painleve.hpp"
#include "elastic_tops/quadrature.hpp"
#include "elastic_tops/reduction.hpp"
#include "support/reference.hpp"

using namespace etop;
using reference::rel;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a measured value against an upper bound.
  void at_most(const std::string& what, double value, double bound) {
    if (!(value <= bound)) pass = false;
    note(what, value, "<=", bound);
  }
  void at_least(const std::string& what, double value, double bound) {
    if (!(value >= bound)) pass = false;
    note(what, value, ">=", bound);
  }
  void require(const std::string& what, bool ok) {
    if (!ok) pass = false;
    sep();
    detail << what << (ok ? " ok" : " FAILED");
  }

 private:
  void sep() {
    if (detail.tellp() > 0) detail << "; ";
  }
  void note(const std::string& what, double value, const char* op, double bound) {
    sep();
    char buf[96];
    std::snprintf(buf, sizeof buf, " %.3g %s %g", value, op, bound);
    detail << what << buf;
  }
};

struct Criterion {
  int id;
  std::string name;
  std::function<void(Outcome&)> run;
};

lie::ModelParams kowalewski(int k) {
  lie::ModelParams p;
  p.c1 = 2, p.c2 = 2, p.c3 = 1, p.a1 = 1;
  p.k = curvature_from_int(k);
  return p;
}

lie::State random_state(Sampler& rng, double sigma) {
  lie::State s;
  for (int i = 0; i < 3; ++i) s.h(i) = rng.normal(0, sigma), s.H(i) = rng.normal(0, sigma);
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1 ----------------------------------------------------------------------
void bracket_table(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (int k : {-1, 0, 1}) {
    const auto b = reference::literal_basis(k);
    const auto lib = lie::basis_matrices(k);
    for (int i = 0; i < 6; ++i) {
      if (lib[i] != b[i]) ++mismatches;
      for (int j = 0; j < 6; ++j) {
        const lie::IntMat4 got = lie::bracket(lib[i], lib[j]);
        const auto coeff = reference::literal_bracket(k, i, j);
        lie::IntMat4 want = lie::IntMat4::Zero();
        for (int l = 0; l < 6; ++l) want += coeff[l] * b[l];
        if (got != want || lie::bracket_table_entry(k, i, j) != coeff) ++mismatches;
      }
    }
  }
  o.at_most("mismatching pairs over 3x36", mismatches, 0);
  o.at_most("runtime s", seconds_since(t0), 1.0);
}

// ---- 2 ----------------------------------------------------------------------
void conservation(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (int k : {-1, 0, 1}) {
    Sampler rng(200 + k);
    lie::IntegrateOptions opts;
    opts.tf = 20;
    for (int n = 0; n < 10; ++n) {
      const lie::Drift d = lie::relative_drift(lie::integrate(random_state(rng, 0.8), kowalewski(k), opts));
      worst = std::max({worst, d.H, d.K2, d.K3, d.K4sq.value_or(1.0)});
    }
  }
  o.at_most("max relative drift H,K2,K3,K4^2", worst, 1e-7);
  o.at_most("runtime s", seconds_since(t0), 5.0);
}

// ---- 3 ----------------------------------------------------------------------
void q_derivative(Outcome& o) {
  double worst = 0;
  for (int k : {-1, 0, 1}) {
    Sampler rng(300 + k);
    const auto p = kowalewski(k);
    for (int n = 0; n < 10000; ++n) worst = std::max(worst, lie::kowalewski_q_derivative_residual(random_state(rng, 1), p));
  }
  o.at_most("max residual over 3x1e4 states", worst, 1e-12);
}

// ---- 4 ----------------------------------------------------------------------
void lax(Outcome& o) {
  double worst = 0;
  for (int k : {-1, 1}) {
    Sampler rng(400 + k);
    auto p = kowalewski(k);
    p.c1 = 0.9, p.c2 = 1.7, p.c3 = 2.2, p.a2 = 0.3, p.a3 = -1.1;
    for (int n = 0; n < 10000; ++n) worst = std::max(worst, lie::lax_residual(random_state(rng, 1), p));
  }
  o.at_most("max residual over 2x1e4 states", worst, 1e-12);
}

// ---- 5 ----------------------------------------------------------------------
void companion(Outcome& o) {
  Sampler rng(500);
  double worst = 0;
  for (int n = 0; n < 100; ++n) {
    const auto c = reference::random_quartic(rng);
    for (int m = 0; m < 100; ++m) {
      const Complex x = rng.complex_normal(), y = rng.complex_normal();
      const Complex lhs = c.R(x, y) * c.R(x, y) + (x - y) * (x - y) * c.Rhat(x, y);
      const Complex rhs = reference::P_ref(c, x) * reference::P_ref(c, y);
      worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
  }
  o.at_most("relative residual 100x100", worst, 1e-10);
  const auto lem = elliptic::QuarticCurve::lemniscate();
  double lw = 0;
  for (int n = 0; n < 100; ++n) {
    const Complex x = rng.complex_normal(), y = rng.complex_normal();
    lw = std::max(lw, std::abs(lem.Rhat(x, y) + (x + y) * (x + y)) / (1 + std::norm(x + y)));
  }
  o.at_most("lemniscate companion vs -(x+y)^2", lw, 1e-13);
}

// ---- 6 ----------------------------------------------------------------------
void discriminant(Outcome& o) {
  Sampler rng(600);
  double worst = 0;
  for (int n = 0; n < 100; ++n) {
    const auto c = reference::random_quartic(rng);
    for (int m = 0; m < 100; ++m) {
      const Complex th = rng.complex_normal(), x = rng.complex_normal();
      const Complex want = reference::p_ref(c, th) * reference::P_ref(c, x);
      worst = std::max(worst, rel(elliptic::ThetaFamily(c, th).G(x), want));
    }
  }
  o.at_most("|G - p P| relative, 100x100", worst, 1e-10);
  double cubic = 0;
  for (int n = 0; n < 100; ++n) {
    const auto c = reference::random_quartic(rng);
    const auto w = elliptic::weierstrass_invariants(c);
    const Complex xi = rng.complex_normal();
    const Complex want = 4.0 * (4.0 * xi * xi * xi - w.g2 * xi - w.g3);
    cubic = std::max({cubic, rel(elliptic::p_theta(c, elliptic::theta_of_xi(c, xi)), want),
                      rel(w.g2, reference::g2_ref(c)), rel(w.g3, reference::g3_ref(c))});
  }
  o.at_most("p(2(xi+C)) vs 4(4xi^3-g2 xi-g3), 100 xi", cubic, 1e-10);
}

// ---- 7 ----------------------------------------------------------------------
void euler_solution(Outcome& o) {
  Sampler rng(700);
  double slope = 0;
  int points = 0;
  for (int draw = 0; draw < 10; ++draw) {
    const auto c = reference::random_quartic(rng);
    const elliptic::ThetaFamily fam(c, rng.complex_normal());
    for (int m = 0; m < 10; ++m, ++points) {
      slope = std::max(slope, elliptic::euler_solution_check(fam, rng.complex_normal(), m % 2 ? 1 : -1).residual);
    }
  }
  o.at_most("slope residual at " + std::to_string(points) + " points", slope, 1e-8);
  double recon = 0;
  for (int n = 0; n < 100; ++n) {
    const auto c = reference::random_quartic(rng);
    const Complex a = rng.complex_normal(), b = rng.complex_normal();
    for (Complex th : elliptic::theta_through(c, a, b)) {
      const double scale = 1.0 + std::norm(th) * std::norm(a - b) + std::abs(reference::R_ref(c, a, b) * th);
      recon = std::max(recon, std::abs(reference::Phi_ref(c, th, a, b)) / scale);
    }
  }
  o.at_most("Phi_theta(a,b) after reconstruction", recon, 1e-10);
}

// ---- 8 ----------------------------------------------------------------------
void weil_maps(Outcome& o) {
  using namespace elliptic;
  Sampler rng(800);
  double closure = 0;
  int maps = 0;
  while (maps < 1000) {
    const auto c = reference::random_quartic(rng);
    const auto w = weierstrass_invariants(c);
    const Complex xi = rng.complex_normal(), x = rng.complex_normal();
    const GammaPoint g{xi, std::sqrt(w.rhs(xi)), false};
    const CPoint m{x, std::sqrt(reference::P_ref(c, x))};
    for (const CPoint& r : {weil_add(c, g, m), weil_sub(c, g, m)}) {
      const Complex P = reference::P_ref(c, r.x);
      closure = std::max(closure, std::abs(r.u * r.u - P) / (1 + std::abs(P)));
      ++maps;
    }
  }
  o.at_most("|v^2 - P(y)| over 1e3 maps", closure, 1e-9);
  double lo = 1e300, hi = 0;
  for (int n = 0; n < 20; ++n) {
    const auto c = reference::random_quartic(rng);
    const Complex x = rng.complex_normal(), y = rng.complex_normal();
    const CPoint m{x, std::sqrt(c.P(x))}, p{y, std::sqrt(c.P(y))};
    const Complex dx = rng.complex_normal(), dy = rng.complex_normal();
    const auto coarse = differential_relations_check(c, m, p, dx, dy, 2e-3);
    const auto fine = differential_relations_check(c, m, p, dx, dy, 1e-3);
    for (double r : {coarse.error_xi / fine.error_xi, coarse.error_xip / fine.error_xip}) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  o.at_least("min error ratio under h-halving", lo, 3.5);
  o.at_most("max error ratio under h-halving", hi, 4.5);
}

// ---- 9 ----------------------------------------------------------------------
void reduction_suite(Outcome& o) {
  reduction::ResidualStats worst;
  double variety = 0, ode = 0, zeta = 0, recovery = 0;
  for (int k : {-1, 0, 1}) {
    Sampler rng(900 + k);
    lie::IntegrateOptions opts;
    opts.tf = 20;
    opts.output_dt = 0.01;
    opts.tol = {1e-12, 1e-14};
    for (int run = 0; run < 3; ++run) {
      const auto tr = lie::integrate(random_state(rng, 0.8), kowalewski(k), opts);
      const auto rep = reduction::reduction_report(tr, kowalewski(k));
      variety = std::max(variety, rep.variety.max);
      ode = std::max(ode, rep.extremal_ode.max);
      zeta = std::max(zeta, rep.zeta.max);
      recovery = std::max({recovery, rep.x3_recovery.max, rep.y3_recovery.max});
    }
  }
  o.at_most("variety", variety, 1e-6);
  o.at_most("extremal ODE", ode, 1e-8);
  o.at_most("zeta zetabar = R0", zeta, 1e-8);
  o.at_most("x3^2/y3^2 recovery", recovery, 1e-6);
}

// ---- 10 ---------------------------------------------------------------------
void quadrature_suite(Outcome& o) {
  double sq = 0, sum = 0;
  bool signs = true;
  std::size_t used = 0, total = 0;
  for (int k : {-1, 0, 1}) {
    Sampler rng(1000 + k);
    lie::IntegrateOptions opts;
    opts.tf = 10;
    opts.output_dt = 5e-4;
    opts.tol = {1e-12, 1e-14};
    for (int run = 0; run < 3; ++run) {
      const auto tr = lie::integrate(random_state(rng, 0.8), kowalewski(k), opts);
      const auto rep = quadrature::quadrature_residual(tr, kowalewski(k));
      sq = std::max({sq, rep.max_residual_sq[0], rep.max_residual_sq[1]});
      sum = std::max(sum, rep.max_residual_sum);
      // Segments are split at sign seams and at interior coalescence windows.
      signs = signs && rep.rho.size() >= rep.seam_count + 1 &&
              rep.rho.size() <= rep.seam_count + rep.excluded_windows + 1;
      for (int r : rep.rho) signs = signs && (r == 1 || r == -1);
      used += rep.samples_used;
      total += tr.size();
    }
  }
  o.at_most("(dxi/dt)^2 (xi1-xi2)^2 - U(xi)", sq, 1e-5);
  o.at_most("differential sum", sum, 1e-5);
  o.require("one rho = +-1 per seamed segment", signs);
  o.at_least("fraction of samples outside coalescence windows", double(used) / double(total), 0.5);
}

// ---- 11 ---------------------------------------------------------------------
painleve::RatioParams ratio(double m, double a1, double a3, int k = 0, int eps = 1, double c = 1.0) {
  painleve::RatioParams p;
  p.m = m, p.a1 = a1, p.a3 = a3, p.k = k, p.eps = eps, p.c = c;
  return p;
}

void painleve_suite(Outcome& o) {
  using namespace painleve;
  Sampler rng(1100);
  double det = 0, reference_gap = 0;
  for (Family fam : {Family::A, Family::B}) {
    int draws = 0;
    while (draws < 20) {
      const auto p = ratio(rng.uniform(0.1, 2.0), rng.uniform(0.3, 2), rng.uniform(-1, 1), int(rng.uniform(-1, 2)),
                           rng.uniform(0, 1) < 0.5 ? 1 : -1, rng.uniform(0.5, 2));
      if (std::abs(p.m - 1) < 1e-2 || std::abs(2 * p.m - 1) < 1e-2) continue;
      const auto set = leading_order_solutions(p);
      const LeadingOrder* lo = nullptr;
      for (const auto& s : set.solutions) {
        if (s.family == fam) lo = &s;
      }
      if (!lo) continue;
      ++draws;
      for (int n = 1; n <= 8; ++n) {
        const Complex want = delta_closed_form(double(n), p, fam);
        det = std::max(det, std::abs(determinant(stage_matrix(double(n), p, *lo)) - want) / (1 + std::abs(want)));
        if (fam == Family::B) reference_gap = std::max(reference_gap, rel(want, reference::delta_b_ref(double(n), p.m)));
        if (fam == Family::A && p.a3 == 0.0) reference_gap = std::max(reference_gap, rel(want, reference::delta_a_ref(double(n), p.m)));
      }
    }
  }
  o.at_most("det vs closed form, n=1..8 x 20 draws x 2 branches", det, 1e-10);
  o.at_most("closed form vs hand-written reference", reference_gap, 1e-10);

  bool six = true;
  for (int k : {-1, 0, 1}) {
    for (const auto& b : resonance_spectrum(ratio(0.5, 1, 0, k))) {
      if (b.family != Family::B) continue;
      std::vector<int> ns;
      for (const auto& r : b.resonances) {
        if (r.kernel_dim == 1 && r.consistent) ns.push_back(r.n);
      }
      six = six && b.stage0_constants == 2 && ns == std::vector<int>{1, 2, 3, 4} && b.free_constants == 6;
    }
  }
  o.require("m=1/2, a3=0: 6 constants (2 + resonances 1,2,3,4), each k", six);

  int generic = 0;
  for (double m : {0.3, 0.7, 1.3, 2.0}) {
    for (double a3 : {0.0, 0.2}) {
      for (int k : {-1, 0, 1}) {
        for (const auto& b : resonance_spectrum(ratio(m, 1, a3, k))) generic = std::max(generic, b.free_constants);
      }
    }
  }
  o.at_most("generic m free constants", generic, 4);

  int mzero = 0;
  for (const auto& b : resonance_spectrum(ratio(0, 1, 0.5))) {
    for (const auto& r : b.resonances) {
      if (r.n == 2) mzero = std::max(mzero, r.kernel_dim);
    }
  }
  o.require("m=0 kernel at n=2 has dimension 2", mzero == 2);

  // Grid over m, a1, a3, k: each point lands in its expected class.
  int wrong = 0;
  std::set<MeromorphicClass> seen;
  for (int i = 0; i <= 20; ++i) {
    const double m = i / 10.0;
    for (double a1 : {0.0, 1.0}) {
      for (double a3 : {0.0, 0.5}) {
        for (int k : {-1, 0, 1}) {
          MeromorphicClass want = MeromorphicClass::NonMeromorphic;
          if (a1 == 0 && a3 == 0) {
            want = MeromorphicClass::ZeroTranslation;
          } else if (a1 == 0) {
            want = MeromorphicClass::Lagrange;
          } else if (i == 10) {
            want = MeromorphicClass::Spherical;
          } else if (i == 5 && a3 == 0) {
            want = MeromorphicClass::Kowalewski;
          }
          const auto got = classify(ratio(m, a1, a3, k));
          if (got.cls != want || (want == MeromorphicClass::NonMeromorphic && got.free_constants >= 6)) ++wrong;
          if (got.cls != MeromorphicClass::NonMeromorphic) seen.insert(got.cls);
        }
      }
    }
  }
  o.at_most("misclassified grid points (252)", wrong, 0);
  o.require("exactly four meromorphic classes found", seen.size() == 4);
}

// ---- 12 ---------------------------------------------------------------------
void laurent_suite(Outcome& o) {
  using namespace painleve;
  Sampler rng(1200);
  std::vector<double> t;
  for (int i = 0; i < 15; ++i) t.push_back(1e-3 * std::pow(1e2, i / 14.0));
  double slope = 1e300;
  for (int k : {-1, 0, 1}) {
    for (int eps : {1, -1}) {
      const auto p = ratio(0.5, 1, 0, k, eps);
      const LeadingOrder* lo = nullptr;
      const auto set = leading_order_solutions(p, rng.complex_normal(0.5));
      for (const auto& s : set.solutions) {
        if (s.family == Family::B) lo = &s;
      }
      if (!lo) throw std::runtime_error("h0 = 0 branch missing");
      std::map<int, std::vector<Complex>> fv;
      for (int n = 1; n <= 4; ++n) fv[n] = {rng.complex_normal(0.5)};
      slope = std::min(slope, series_residual(laurent_expand(p, *lo, fv, 8), t).slope);
    }
  }
  o.at_least("min log-log slope, N=8, t in [1e-3,1e-1]", slope, 5.0);

  // Explicit low stages on the r0 = 0 branch, m = 1/2, a3 = 0, k = 0, a1 = 1.
  const Complex I{0.0, 1.0};
  double stages = 0;
  for (int eps : {1, -1}) {
    const double m = 0.5, a1 = 1.0, k = 0.0, e = eps;
    const auto p = ratio(m, a1, 0, 0, eps);
    const LeadingOrder* lo = nullptr;
    const auto set = leading_order_solutions(p);
    for (const auto& s : set.solutions) {
      if (s.family == Family::A) lo = &s;
    }
    if (!lo) throw std::runtime_error("r0 = 0 branch missing");
    const Complex q2 = rng.complex_normal(), g3 = rng.complex_normal(), q4 = rng.complex_normal();
    const Complex h3 = -0.25 * k * a1 * q2;
    std::vector<V3<Complex>> Ks{lo->K0, {0, 0, 0}}, Ps{lo->P0, {0, 0, 0}};
    Ks.push_back({0.0, q2, 0.0});
    Ps.push_back({e * I * q2 / a1 + (k / m) * a1, 0.0, q2 / a1});
    Ks.push_back({I * e * (m - 1) * a1 * g3 / (2 * m), a1 * h3 / 2.0, -a1 * g3 / 2.0});
    Ps.push_back({-I * e * h3, g3, h3});
    Ks.push_back({0.0, q4, 0.0});
    Ps.push_back({-m * q2 * q2 / (2 * a1) - 2.0 * e * I * q4 / a1, 0.0, 3.0 * q4 / a1});
    for (int n = 2; n <= 4; ++n) {
      const std::vector<V3<Complex>> K(Ks.begin(), Ks.begin() + n + 1), P(Ps.begin(), Ps.begin() + n + 1);
      stages = std::max(stages, stage_equation_residual(n, p, *lo, K, P));
    }
  }
  o.at_most("explicit stages n=2,3,4 in the recursion", stages, 1e-10);
}

// ---- 13 ---------------------------------------------------------------------
void limit_system(Outcome& o) {
  Sampler rng(1300);
  double modulus = 0, pendulum = 0;
  for (int run = 0; run < 10; ++run) {
    lie::ModelParams p;
    p.mode = lie::InertiaMode::AxisymmetricInfinite;
    p.c3 = rng.uniform(0.5, 2);
    p.a1 = rng.normal(), p.a2 = rng.normal();
    p.k = curvature_from_int(run % 3 - 1);
    lie::State s0 = random_state(rng, 0.8);
    s0.H(0) = s0.H(1) = 0;
    lie::IntegrateOptions opts;
    opts.tf = 10;
    opts.tol = {1e-12, 1e-14};
    const auto tr = lie::integrate(s0, p, opts);
    const double m0 = lie::m0_modulus(s0, p), e = lie::hamiltonian(s0, p);
    for (const auto& s : tr.states) {
      modulus = std::max(modulus, std::abs(lie::m0_modulus(s, p) - m0) / std::max(1.0, m0));
      pendulum = std::max(pendulum, lie::m0_pendulum_residual(s, p, e));
    }
  }
  o.at_most("|w - ka|^2 drift", modulus, 1e-8);
  o.at_most("pendulum relation", pendulum, 1e-8);
}

// ---- 14 ---------------------------------------------------------------------
void euclidean_integrals(Outcome& o) {
  Sampler rng(1400);
  double drift = 0, norm = 0;
  for (int run = 0; run < 3; ++run) {
    lie::IntegrateOptions opts;
    opts.tf = 10;
    opts.with_frame = true;
    const auto tr = lie::integrate(random_state(rng, 0.8), kowalewski(0), opts);
    drift = std::max(drift, lie::relative_drift(tr).F.value_or(lie::Vec3::Constant(1.0)).maxCoeff());
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const lie::Vec3 F = lie::euclidean_right_integrals(tr.states[i], tr.frames[i], Curvature::Flat);
      norm = std::max(norm, std::abs(F.squaredNorm() - tr.states[i].h.squaredNorm()) / (1 + F.squaredNorm()));
    }
  }
  o.at_most("F_i drift", drift, 1e-6);
  o.at_most("|F|^2 - |h|^2 pointwise", norm, 1e-12);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "bracket table", bracket_table},
      {2, "conservation along Kowalewski runs", conservation},
      {3, "q derivative identity", q_derivative},
      {4, "Lax identity", lax},
      {5, "companion form identity", companion},
      {6, "pencil discriminant and cubic", discriminant},
      {7, "Euler implicit solution", euler_solution},
      {8, "addition maps on the curve", weil_maps},
      {9, "reduction along trajectories", reduction_suite},
      {10, "hyperelliptic quadrature", quadrature_suite},
      {11, "resonance determinants and classification", painleve_suite},
      {12, "Laurent series", laurent_suite},
      {13, "m = 0 limiting system", limit_system},
      {14, "Euclidean right integrals", euclidean_integrals},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(std::string("threw: ") + e.what(), false);
    }
    if (!o.pass) ++failed;
    std::printf("[%2d] %s  %s (%.2f s): %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name.c_str(), seconds_since(t0),
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
