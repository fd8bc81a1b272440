#include "elastic_tops/painleve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace etop::painleve {

namespace {

template <class T>
double mag(const T& z) {
  using std::abs;
  return static_cast<double>(abs(z));
}

template <class T>
T cplx(double re, double im = 0.0) {
  return T(re, im);
}

template <class T>
T from_complex(Complex z) {
  return T(z.real(), z.imag());
}

Complex to_complex(const QComplex& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

template <class T>
V3<T> cross(const V3<T>& a, const V3<T>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <class T>
V3<T> operator+(const V3<T>& a, const V3<T>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

template <class T>
V3<T> operator-(const V3<T>& a, const V3<T>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

template <class T>
V3<T> operator*(const T& s, const V3<T>& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

template <class T>
T dot(const V3<T>& a, const V3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class T>
double norm_inf(const V3<T>& a) {
  return std::max({mag(a[0]), mag(a[1]), mag(a[2])});
}

// Scalars of the complexified system in arithmetic T.
template <class T>
struct System {
  T m, c, k;
  V3<T> a;

  explicit System(const RatioParams& p)
      : m(cplx<T>(p.m)), c(cplx<T>(p.c)), k(cplx<T>(p.k)), a{cplx<T>(p.a1), T(0), cplx<T>(p.a3)} {}

  // J0 K J0 as a vector: (m p / c, m q / c, r / c).
  V3<T> W(const V3<T>& K) const { return {m * K[0] / c, m * K[1] / c, K[2] / c}; }
};

template <class T>
struct Leading {
  V3<T> K0, P0;
};

template <class T>
Leading<T> leading_in(const RatioParams& p, Family family, int eps, std::optional<T> q0_free) {
  const T I = cplx<T>(0.0, 1.0);
  const T e = cplx<T>(eps);
  const T m = cplx<T>(p.m);
  const T c = cplx<T>(p.c);
  const T a1 = cplx<T>(p.a1);
  const T a3 = cplx<T>(p.a3);
  const T two = cplx<T>(2.0);
  Leading<T> lo;
  if (family == Family::A) {
    const T h0 = two * c / (m * (a3 + e * I * a1));
    lo.K0 = {T(0), two * e * I * c / m, T(0)};
    lo.P0 = {I * e * h0, T(0), h0};
  } else {
    const T q0 = q0_free ? *q0_free : two * a3 * c / (a1 * (two * m - cplx<T>(1.0)));
    const T f0 = two * c / a1;
    lo.K0 = {-I * e * q0, q0, two * e * I * c};
    lo.P0 = {f0, I * e * f0, T(0)};
  }
  return lo;
}

template <class T>
Leading<T> leading_in(const RatioParams& p, const LeadingOrder& lo) {
  std::optional<T> q0;
  if (lo.q0_free) q0 = from_complex<T>(lo.K0[1]);
  return leading_in<T>(p, lo.family, lo.eps, q0);
}

// Left-hand side of stage n at (Kn, Pn).
template <class T>
std::pair<V3<T>, V3<T>> stage_lhs(const T& n, const System<T>& s, const Leading<T>& lo, const V3<T>& Kn,
                                  const V3<T>& Pn) {
  const V3<T> W0 = s.W(lo.K0);
  const T one = cplx<T>(1.0);
  const T two = cplx<T>(2.0);
  V3<T> lk = (n - one) * Kn - cross(Kn, W0) - cross(lo.K0, s.W(Kn)) - cross(Pn, s.a);
  V3<T> lp = (n - two) * Pn - cross(Pn, W0) - cross(lo.P0, s.W(Kn));
  return {lk, lp};
}

template <class T>
M6<T> stage_matrix_in(const T& n, const System<T>& s, const Leading<T>& lo) {
  M6<T> m{};
  for (int j = 0; j < 6; ++j) {
    V3<T> Kn{T(0), T(0), T(0)};
    V3<T> Pn{T(0), T(0), T(0)};
    if (j < 3) {
      Kn[j] = cplx<T>(1.0);
    } else {
      Pn[j - 3] = cplx<T>(1.0);
    }
    const auto [lk, lp] = stage_lhs(n, s, lo, Kn, Pn);
    for (int i = 0; i < 3; ++i) {
      m[i][j] = lk[i];
      m[3 + i][j] = lp[i];
    }
  }
  return m;
}

// Right-hand side of stage n; Ks and Ps hold at least stages 0..n-1.
template <class T>
V6<T> stage_rhs_in(int n, const System<T>& s, const std::vector<V3<T>>& Ks, const std::vector<V3<T>>& Ps) {
  V3<T> rk{T(0), T(0), T(0)};
  V3<T> rp{T(0), T(0), T(0)};
  for (int i = 1; i <= n - 1; ++i) {
    const V3<T> Wi = s.W(Ks[i]);
    rk = rk + cross(Ks[n - i], Wi);
    rp = rp + cross(Ps[n - i], Wi);
  }
  if (n >= 2) rp = rp + s.k * cross(Ks[n - 2], s.a);
  return {rk[0], rk[1], rk[2], rp[0], rp[1], rp[2]};
}

template <class T>
T det_rec(const M6<T>& m, int row, std::array<int, 6>& cols, int ncols) {
  if (ncols == 1) return m[row][cols[0]];
  T acc = T(0);
  for (int j = 0; j < ncols; ++j) {
    const T entry = m[row][cols[j]];
    std::array<int, 6> sub{};
    int w = 0;
    for (int l = 0; l < ncols; ++l) {
      if (l != j) sub[w++] = cols[l];
    }
    if (mag(entry) == 0.0) continue;
    const T minor = det_rec(m, row + 1, sub, ncols - 1);
    if (j % 2 == 0) {
      acc += entry * minor;
    } else {
      acc -= entry * minor;
    }
  }
  return acc;
}

template <class T>
M6<T> to_matrix(const M6<Complex>& m) {
  M6<T> out{};
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) out[i][j] = from_complex<T>(m[i][j]);
  }
  return out;
}

bool is_unit(int eps) { return eps == 1 || eps == -1; }

}  // namespace

void RatioParams::validate() const {
  if (!(c > 0) || !std::isfinite(c)) throw std::invalid_argument("c must be positive");
  if (!(m >= 0) || !std::isfinite(m)) throw std::invalid_argument("m must be non-negative");
  if (!std::isfinite(a1) || !std::isfinite(a3)) throw std::invalid_argument("a must be finite");
  if (a1 == 0.0 && a3 == 0.0) throw std::invalid_argument("a1^2 + a3^2 must be non-zero");
  curvature_from_int(k);
  if (!is_unit(eps)) throw std::invalid_argument("epsilon must be +1 or -1");
}

std::string to_string(Family f) { return f == Family::A ? "r0=0" : "h0=0"; }

LeadingOrderSet leading_order_solutions(const RatioParams& params, Complex q0) {
  params.validate();
  if (params.a1 == 0.0) throw std::invalid_argument("leading orders need a1 != 0");
  if (params.m == 1.0) throw std::invalid_argument("leading orders need m != 1");
  LeadingOrderSet out;
  if (params.m != 0.0) {
    const auto l = leading_in<Complex>(params, Family::A, params.eps, std::nullopt);
    out.solutions.push_back({l.K0, l.P0, Family::A, params.eps, false});
  } else {
    out.excluded.push_back("r0=0 family needs m != 0");
  }
  if (2.0 * params.m - 1.0 == 0.0) {
    if (params.a3 != 0.0) {
      out.excluded.push_back("h0=0 family has no solution when 2m - 1 = 0 and a3 != 0");
    } else {
      const auto l = leading_in<Complex>(params, Family::B, params.eps, q0);
      out.solutions.push_back({l.K0, l.P0, Family::B, params.eps, true});
    }
  } else {
    const auto l = leading_in<Complex>(params, Family::B, params.eps, std::nullopt);
    out.solutions.push_back({l.K0, l.P0, Family::B, params.eps, false});
  }
  return out;
}

double leading_order_residual(const LeadingOrder& lo, const RatioParams& params) {
  const System<Complex> s(params);
  const V3<Complex> W0 = s.W(lo.K0);
  const V3<Complex> rk = Complex(-1.0) * lo.K0 - (cross(lo.K0, W0) + cross(lo.P0, s.a));
  const V3<Complex> rp = Complex(-2.0) * lo.P0 - cross(lo.P0, W0);
  return std::max(norm_inf(rk), norm_inf(rp));
}

std::array<double, 3> leading_order_side_relations(const LeadingOrder& lo, const RatioParams& params) {
  const auto& K = lo.K0;
  const auto& P = lo.P0;
  const double m = params.m;
  const double c = params.c;
  return {std::abs(dot(P, P)), std::abs(m * (K[0] * P[0] + K[1] * P[1]) + K[2] * P[2]),
          std::abs((m * m / (c * c)) * (K[0] * K[0] + K[1] * K[1]) + K[2] * K[2] / (c * c) + 4.0)};
}

bool leading_bracket_nonzero(const LeadingOrder& lo, const RatioParams& params) {
  const System<Complex> s(params);
  return norm_inf(cross(lo.P0, s.W(lo.K0))) > 1e-12 * (1.0 + norm_inf(lo.P0) * norm_inf(lo.K0));
}

M6<Complex> stage_matrix(Complex n, const RatioParams& params, const LeadingOrder& lo) {
  const System<Complex> s(params);
  return stage_matrix_in(n, s, leading_in<Complex>(params, lo));
}

template <class T>
T determinant(const M6<T>& m) {
  std::array<int, 6> cols{0, 1, 2, 3, 4, 5};
  return det_rec(m, 0, cols, 6);
}

template Complex determinant<Complex>(const M6<Complex>&);
template QComplex determinant<QComplex>(const M6<QComplex>&);

Complex delta_closed_form(Complex n, const RatioParams& params, Family family) {
  const Complex I{0.0, 1.0};
  const double m = params.m;
  if (family == Family::B) {
    return (n + 1.0) * (n - 2.0) * (n - 3.0) * (n - 4.0) * (n + 1.0 - 2.0 * m) * (n - 2.0 + 2.0 * m);
  }
  if (m == 0.0) throw std::invalid_argument("r0=0 family needs m != 0");
  const double e = params.eps;
  const Complex d2 = (n + 1.0) * (n - 2.0) * (n - 4.0);
  const Complex inner = ((n * n - n + 2.0) * m - 2.0) * params.a1 - I * e * params.a3 * m * n * (n - 1.0);
  const Complex d1 = (n - 3.0) * inner / (m * (params.a1 - I * e * params.a3));
  return d1 * d2;
}

template <class T>
LinearSolve<T> solve_stage_system(const M6<T>& m, const V6<T>& b, double rank_tol) {
  M6<T> a = m;
  V6<T> r = b;
  std::array<int, 6> col{0, 1, 2, 3, 4, 5};
  double scale = 0;
  double bscale = 0;
  for (int i = 0; i < 6; ++i) {
    bscale = std::max(bscale, mag(b[i]));
    for (int j = 0; j < 6; ++j) scale = std::max(scale, mag(a[i][j]));
  }
  const double tol = rank_tol * std::max(scale, 1e-300);
  int rank = 0;
  for (int step = 0; step < 6; ++step) {
    int pi = step;
    int pj = step;
    double best = -1;
    for (int i = step; i < 6; ++i) {
      for (int j = step; j < 6; ++j) {
        const double v = mag(a[i][j]);
        if (v > best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    }
    if (best <= tol) break;
    std::swap(a[step], a[pi]);
    std::swap(r[step], r[pi]);
    if (pj != step) {
      for (int i = 0; i < 6; ++i) std::swap(a[i][step], a[i][pj]);
      std::swap(col[step], col[pj]);
    }
    for (int i = step + 1; i < 6; ++i) {
      const T f = a[i][step] / a[step][step];
      if (mag(f) == 0.0) continue;
      for (int j = step; j < 6; ++j) a[i][j] -= f * a[step][j];
      r[i] -= f * r[step];
    }
    ++rank;
  }

  LinearSolve<T> out;
  out.rank = rank;
  double tail = 0;
  for (int i = rank; i < 6; ++i) tail = std::max(tail, mag(r[i]));
  out.inconsistency = tail / (1.0 + bscale);

  // Back substitution for the pivot variables given values of the free ones.
  auto back = [&](const V6<T>& rhs, const std::vector<T>& free_vals) {
    V6<T> y{};
    for (int j = rank; j < 6; ++j) y[j] = free_vals[j - rank];
    for (int i = rank - 1; i >= 0; --i) {
      T acc = rhs[i];
      for (int j = i + 1; j < 6; ++j) acc -= a[i][j] * y[j];
      y[i] = acc / a[i][i];
    }
    V6<T> x{};
    for (int j = 0; j < 6; ++j) x[col[j]] = y[j];
    return x;
  };
  const std::vector<T> zeros(6 - rank, T(0));
  out.particular = back(r, zeros);
  V6<T> zero_rhs{};
  for (auto& v : zero_rhs) v = T(0);
  for (int f = 0; f < 6 - rank; ++f) {
    std::vector<T> e(6 - rank, T(0));
    e[f] = cplx<T>(1.0);
    out.kernel.push_back(back(zero_rhs, e));
  }
  return out;
}

template LinearSolve<Complex> solve_stage_system<Complex>(const M6<Complex>&, const V6<Complex>&, double);
template LinearSolve<QComplex> solve_stage_system<QComplex>(const M6<QComplex>&, const V6<QComplex>&, double);

namespace {

constexpr double kRankTol = 1e-9;
constexpr double kObstructionTol = 1e-9;

template <class T>
void assemble_solution(const LinearSolve<T>& sol, const std::vector<T>& free_vals, V3<T>& K, V3<T>& P) {
  V6<T> x = sol.particular;
  for (std::size_t j = 0; j < sol.kernel.size(); ++j) {
    const T coeff = j < free_vals.size() ? free_vals[j] : T(0);
    for (int i = 0; i < 6; ++i) x[i] += coeff * sol.kernel[j][i];
  }
  K = {x[0], x[1], x[2]};
  P = {x[3], x[4], x[5]};
}

}  // namespace

RecursionStage recursion_stage(int n, const RatioParams& params, const LeadingOrder& lo,
                               const std::vector<V3<Complex>>& Ks, const std::vector<V3<Complex>>& Ps,
                               const std::vector<Complex>& free_values) {
  if (n < 1) throw std::invalid_argument("recursion stages start at n = 1");
  if (Ks.size() < static_cast<std::size_t>(n) || Ps.size() < static_cast<std::size_t>(n)) {
    throw std::invalid_argument("recursion stage needs all earlier stages");
  }
  const System<Complex> s(params);
  RecursionStage st;
  st.n = n;
  st.matrix = stage_matrix_in(Complex(n), s, leading_in<Complex>(params, lo));
  st.rhs = stage_rhs_in(n, s, Ks, Ps);
  const auto sol = solve_stage_system(st.matrix, st.rhs, kRankTol);
  st.kernel_dim = 6 - sol.rank;
  st.inconsistency = sol.inconsistency;
  st.obstructed = sol.inconsistency > kObstructionTol;
  assemble_solution(sol, free_values, st.K, st.P);
  return st;
}

double stage_equation_residual(int n, const RatioParams& params, const LeadingOrder& lo,
                               const std::vector<V3<Complex>>& Ks, const std::vector<V3<Complex>>& Ps) {
  if (n < 1 || Ks.size() <= static_cast<std::size_t>(n) || Ps.size() <= static_cast<std::size_t>(n)) {
    throw std::invalid_argument("stage residual needs stages 0..n");
  }
  const System<Complex> s(params);
  const auto [lk, lp] = stage_lhs(Complex(n), s, leading_in<Complex>(params, lo), Ks[n], Ps[n]);
  const V6<Complex> rhs = stage_rhs_in(n, s, Ks, Ps);
  double worst = 0;
  double scale = 1;
  for (int i = 0; i < 3; ++i) {
    worst = std::max({worst, std::abs(lk[i] - rhs[i]), std::abs(lp[i] - rhs[3 + i])});
    scale = std::max({scale, std::abs(rhs[i]), std::abs(rhs[3 + i])});
  }
  return worst / scale;
}

std::string BranchSpectrum::label() const {
  return to_string(family) + (eps > 0 ? " eps=+1" : " eps=-1");
}

namespace {

// Largest positive root of the closed-form determinant, used to bound the scan.
int scan_bound(const RatioParams& p) {
  double top = 4.0;
  top = std::max({top, 2.0 * p.m - 1.0, 2.0 - 2.0 * p.m});
  if (p.m > 0.0) {
    const double disc = 8.0 / p.m - 7.0;
    if (disc >= 0.0) top = std::max(top, 0.5 * (1.0 + std::sqrt(disc)));
  }
  return std::min(64, static_cast<int>(std::ceil(top)) + 2);
}

BranchSpectrum analyse_branch(const RatioParams& params, const LeadingOrder& lo, Sampler& rng) {
  BranchSpectrum b;
  b.family = lo.family;
  b.eps = lo.eps;
  b.q0_free = lo.q0_free;
  b.stage0_constants = lo.q0_free ? 2 : 0;
  b.free_constants = b.stage0_constants;
  std::vector<V3<Complex>> Ks{lo.K0};
  std::vector<V3<Complex>> Ps{lo.P0};
  const int top = scan_bound(params);
  for (int n = 1; n <= top; ++n) {
    std::vector<Complex> free_vals;
    for (int j = 0; j < 6; ++j) free_vals.push_back(rng.complex_normal(0.5));
    const RecursionStage st = recursion_stage(n, params, lo, Ks, Ps, free_vals);
    if (st.kernel_dim > 0) {
      b.resonances.push_back({n, st.kernel_dim, st.inconsistency, !st.obstructed});
      if (st.obstructed) {
        b.obstructed = true;
        break;
      }
      b.free_constants += st.kernel_dim;
    }
    Ks.push_back(st.K);
    Ps.push_back(st.P);
  }
  return b;
}

}  // namespace

std::vector<BranchSpectrum> resonance_spectrum(const RatioParams& params, std::uint64_t seed) {
  Sampler rng(seed);
  std::vector<BranchSpectrum> out;
  for (int eps : {1, -1}) {
    RatioParams p = params;
    p.eps = eps;
    const Complex q0 = rng.complex_normal(0.5);
    for (const LeadingOrder& lo : leading_order_solutions(p, q0).solutions) {
      out.push_back(analyse_branch(p, lo, rng));
    }
  }
  return out;
}

std::string to_string(MeromorphicClass c) {
  switch (c) {
    case MeromorphicClass::ZeroTranslation:
      return "(i) a=0";
    case MeromorphicClass::Lagrange:
      return "(ii) Lagrange";
    case MeromorphicClass::Spherical:
      return "(iii) spherical";
    case MeromorphicClass::Kowalewski:
      return "(iv) Kowalewski";
    case MeromorphicClass::NonMeromorphic:
      return "non-meromorphic";
  }
  return "unknown";
}

Classification classify(const RatioParams& params, std::uint64_t seed) {
  Classification out;
  auto special = [&](MeromorphicClass c) {
    out.cls = c;
    out.free_constants = 6;
    out.deficit = 0;
    return out;
  };
  if (params.a1 == 0.0 && params.a3 == 0.0) return special(MeromorphicClass::ZeroTranslation);
  params.validate();
  if (params.a1 == 0.0) return special(MeromorphicClass::Lagrange);
  if (params.m == 1.0) return special(MeromorphicClass::Spherical);

  const auto spectra = resonance_spectrum(params, seed);
  const BranchSpectrum* best = nullptr;
  for (const auto& b : spectra) {
    if (!best || b.free_constants > best->free_constants) best = &b;
  }
  out.free_constants = best ? best->free_constants : 0;
  out.deficit = 6 - out.free_constants;
  out.cls = out.free_constants >= 6 ? MeromorphicClass::Kowalewski : MeromorphicClass::NonMeromorphic;
  if (best) {
    out.branch = best->label();
    for (const auto& r : best->resonances) {
      if (!out.resonances.empty()) out.resonances += ';';
      out.resonances += std::to_string(r.n) + ':' + std::to_string(r.kernel_dim);
      if (!r.consistent) out.resonances += '!';
    }
  }
  return out;
}

// ---- Laurent series -------------------------------------------------------

LaurentSolution laurent_expand(const RatioParams& params, const LeadingOrder& lo,
                               const std::map<int, std::vector<Complex>>& free_values, int order) {
  if (order < 0) throw std::invalid_argument("truncation order must be non-negative");
  params.validate();
  const System<QComplex> s(params);
  const Leading<QComplex> lead = leading_in<QComplex>(params, lo);
  LaurentSolution sol;
  sol.params = params;
  sol.leading = lo;
  sol.order = order;
  sol.free_values = free_values;
  sol.K.push_back(lead.K0);
  sol.P.push_back(lead.P0);
  for (int n = 1; n <= order; ++n) {
    const M6<QComplex> m = stage_matrix_in(QComplex(n), s, lead);
    const V6<QComplex> rhs = stage_rhs_in(n, s, sol.K, sol.P);
    const auto ls = solve_stage_system(m, rhs, kRankTol);
    const int kdim = 6 - ls.rank;
    if (kdim > 0) {
      sol.kernel_dims[n] = kdim;
      if (ls.inconsistency > 1e-20) {
        throw ObstructionError("stage " + std::to_string(n) + " is singular with an inconsistent right-hand side",
                               n);
      }
    }
    std::vector<QComplex> fv;
    if (auto it = free_values.find(n); it != free_values.end()) {
      for (Complex z : it->second) fv.push_back(from_complex<QComplex>(z));
    }
    V3<QComplex> K, P;
    assemble_solution(ls, fv, K, P);
    sol.K.push_back(K);
    sol.P.push_back(P);
  }
  return sol;
}

SeriesResidualReport series_residual(const LaurentSolution& sol, const std::vector<double>& times) {
  const System<QComplex> s(sol.params);
  SeriesResidualReport rep;
  for (double tt : times) {
    if (!(tt > 0)) throw std::invalid_argument("series residual needs positive times");
    const QComplex t(tt, 0.0);
    V3<QComplex> K{}, P{}, dK{}, dP{};
    for (auto* v : {&K, &P, &dK, &dP}) v->fill(QComplex(0));
    QComplex tp = QComplex(1) / t;  // t^(n-1)
    for (int n = 0; n <= sol.order; ++n) {
      const QComplex tk = tp;              // t^(n-1)
      const QComplex tpp = tp / t;         // t^(n-2)
      const QComplex tppp = tpp / t;       // t^(n-3)
      K = K + tk * sol.K[n];
      P = P + tpp * sol.P[n];
      dK = dK + (QComplex(n - 1) * tpp) * sol.K[n];
      dP = dP + (QComplex(n - 2) * tppp) * sol.P[n];
      tp *= t;
    }
    const V3<QComplex> W = s.W(K);
    const V3<QComplex> rk = dK - (cross(K, W) + cross(P, s.a));
    const V3<QComplex> rp = dP - (cross(P, W) + s.k * cross(K, s.a));
    rep.t.push_back(tt);
    rep.residual.push_back(std::max(norm_inf(rk), norm_inf(rp)));
  }
  // Least-squares slope in log-log coordinates.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    if (!(rep.residual[i] > 0)) continue;
    const double x = std::log(rep.t[i]);
    const double y = std::log(rep.residual[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    const double nn = static_cast<double>(cnt);
    rep.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  }
  return rep;
}

SeriesInvariants series_invariants(const LaurentSolution& sol) {
  const int N = sol.order;
  const QComplex m(sol.params.m);
  const QComplex c(sol.params.c);
  const QComplex k(sol.params.k);
  const System<QComplex> s(sol.params);
  SeriesInvariants out;
  for (int n = 0; n <= N; ++n) {
    QComplex kin(0), pp(0), kk(0), pk(0);
    for (int i = 0; i <= n; ++i) {
      const auto& Ki = sol.K[i];
      const auto& Kj = sol.K[n - i];
      kin += m * (Ki[0] * Kj[0] + Ki[1] * Kj[1]) + Ki[2] * Kj[2];
      pp += dot(sol.P[i], sol.P[n - i]);
      pk += dot(sol.P[i], sol.K[n - i]);
    }
    for (int i = 0; i <= n - 2; ++i) kk += dot(sol.K[i], sol.K[n - 2 - i]);
    const QComplex energy = kin / (QComplex(2) * c) + dot(s.a, sol.P[n]);
    out.energy.push_back(to_complex(energy));
    out.G.push_back(to_complex(pp + k * kk));
    out.J.push_back(to_complex(pk));
  }
  return out;
}

Complex series_pk(const LaurentSolution& sol, double tt) {
  const QComplex t(tt, 0.0);
  V3<QComplex> K{}, P{};
  K.fill(QComplex(0));
  P.fill(QComplex(0));
  QComplex tp = QComplex(1) / t;
  for (int n = 0; n <= sol.order; ++n) {
    K = K + tp * sol.K[n];
    P = P + (tp / t) * sol.P[n];
    tp *= t;
  }
  return to_complex(dot(P, K));
}

}  // namespace etop::painleve
