#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "elastic_tops/common.hpp"

namespace etop::lie {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// How the inertia coefficients enter the Hamiltonian. The limiting modes
/// drop the corresponding kinetic terms instead of dividing by a huge c.
enum class InertiaMode {
  Finite,
  AxisymmetricInfinite,  // c1 = c2 -> infinity
  ThirdInfinite,         // c3 -> infinity
};

struct ModelParams {
  double c1 = 1.0, c2 = 1.0, c3 = 1.0;
  double a1 = 0.0, a2 = 0.0, a3 = 0.0;
  Curvature k = Curvature::Flat;
  InertiaMode mode = InertiaMode::Finite;

  /// Throws std::invalid_argument on non-positive or non-finite data.
  void validate() const;
  /// Per-axis 1/c, with zeros on the axes sent to infinity.
  Vec3 inverse_inertia() const;
  Vec3 a() const { return {a1, a2, a3}; }
  int kv() const { return value(k); }
  /// c1 = c2 = 2 c3 and a3 = 0, to relative tolerance `tol`.
  bool is_kowalewski(double tol = 1e-14) const;
};

/// Coordinates (h, H) on the dual Lie algebra. T is double for physical runs
/// and std::complex<double> for the complexified system.
template <class T>
struct MomentumState {
  Eigen::Matrix<T, 3, 1> h = Eigen::Matrix<T, 3, 1>::Zero();
  Eigen::Matrix<T, 3, 1> H = Eigen::Matrix<T, 3, 1>::Zero();

  static constexpr bool is_complex = !std::is_same_v<T, double>;

  MomentumState operator+(const MomentumState& o) const { return {h + o.h, H + o.H}; }
  MomentumState operator-(const MomentumState& o) const { return {h - o.h, H - o.H}; }
  MomentumState operator*(T s) const { return {h * s, H * s}; }
  double norm() const { return std::sqrt(h.squaredNorm() + H.squaredNorm()); }
};

using State = MomentumState<double>;
using ComplexState = MomentumState<Complex>;

State make_state(const Vec3& h, const Vec3& H);

/// Antisymmetric matrix with hat(x) y = x × y.
template <class T>
Eigen::Matrix<T, 3, 3> hat(const Eigen::Matrix<T, 3, 1>& v) {
  Eigen::Matrix<T, 3, 3> m;
  m << T(0), -v(2), v(1), v(2), T(0), -v(0), -v(1), v(0), T(0);
  return m;
}

template <class T>
Eigen::Matrix<T, 3, 1> vee(const Eigen::Matrix<T, 3, 3>& m) {
  return {m(2, 1), m(0, 2), m(1, 0)};
}

/// Lie bracket [X, Y] = Y X - X Y, the convention of the bracket table.
template <class M>
M bracket(const M& x, const M& y) {
  return y * x - x * y;
}

// ---- Lie algebra ----------------------------------------------------------

using IntMat4 = Eigen::Matrix<int, 4, 4>;

/// B1, B2, B3, A1, A2, A3 in that order.
std::array<IntMat4, 6> basis_matrices(int k);

/// Expected bracket of basis elements i and j as an integer combination of
/// the basis (coefficients in the same B1..A3 order).
std::array<int, 6> bracket_table_entry(int k, std::size_t i, std::size_t j);

IntMat4 combine(const std::array<IntMat4, 6>& basis, const std::array<int, 6>& coeffs);

/// Number of the 36 basis pairs whose commutator disagrees with the table.
int bracket_table_mismatches(int k);

// ---- Hamiltonian dynamics -------------------------------------------------

template <class T>
T hamiltonian(const MomentumState<T>& p, const ModelParams& params) {
  const Vec3 ic = params.inverse_inertia();
  T kinetic = T(0);
  for (int i = 0; i < 3; ++i) kinetic += p.H(i) * p.H(i) * ic(i);
  return T(0.5) * kinetic + p.h.dot(params.a().template cast<T>());
}

/// Componentwise right-hand side: dh = h × Ω + k H × a, dH = H × Ω + h × a.
template <class T>
MomentumState<T> vector_field(const MomentumState<T>& p, const ModelParams& params) {
  using V = Eigen::Matrix<T, 3, 1>;
  const V omega = p.H.cwiseProduct(params.inverse_inertia().template cast<T>());
  const V a = params.a().template cast<T>();
  const T k = T(params.kv());
  MomentumState<T> d;
  d.h = p.h.cross(omega) + k * p.H.cross(a);
  d.H = p.H.cross(omega) + p.h.cross(a);
  return d;
}

/// Same field assembled from commutators of antisymmetric 3×3 matrices.
template <class T>
MomentumState<T> vector_field_commutator(const MomentumState<T>& p, const ModelParams& params) {
  using V = Eigen::Matrix<T, 3, 1>;
  const V omega = p.H.cwiseProduct(params.inverse_inertia().template cast<T>());
  const auto W = hat<T>(omega);
  const auto A = hat<T>(params.a().template cast<T>());
  const auto K = hat<T>(p.H);
  const auto P = hat<T>(p.h);
  const T k = T(params.kv());
  MomentumState<T> d;
  d.H = vee<T>(bracket(W, K) + bracket(A, P));
  d.h = vee<T>(bracket(W, P) + k * bracket(A, K));
  return d;
}

struct Invariants {
  double H = 0, K2 = 0, K3 = 0;
  std::optional<double> K4sq;
  std::optional<Vec3> F;
};

/// H, the Casimirs K2 = |h|² + k|H|², K3 = h·H, and |q|² in the Kowalewski
/// case. F is filled only when a frame is supplied and k = 0.
Invariants conserved_quantities(const State& p, const ModelParams& params,
                                const std::optional<Mat4>& frame = std::nullopt);

/// Kowalewski variable q = z² - A (w - k A) with z = (H1 + iH2)/2,
/// w = h1 + i h2 and A = c3 (a1 + i a2).
Complex kowalewski_q(const State& p, const ModelParams& params);

/// |dq/dt + i (H3/c3) q| / (1 + |q|), dq/dt by the chain rule through the
/// vector field. Throws std::invalid_argument outside the Kowalewski case.
double kowalewski_q_derivative_residual(const State& p, const ModelParams& params);

/// Rotation block of g projected to SO(3), applied to h. Requires k = 0.
Vec3 euclidean_right_integrals(const State& p, const Mat4& g, Curvature k);

/// 4×4 matrix U(p) identifying the state with the algebra.
Mat4 lax_matrix(const State& p, int k);
/// dH_p = Σ a_i B_i + Ω_i A_i.
Mat4 hamiltonian_differential(const State& p, const ModelParams& params);
/// max |U(dp/dt) - [dH_p, U]| / (1 + |U|·|dH_p|). Requires k ≠ 0.
double lax_residual(const State& p, const ModelParams& params);

// ---- group frames ---------------------------------------------------------

/// J = diag(-1,1,1,1) for k = -1, identity otherwise.
Mat4 group_metric(int k);
/// Deviation of g from its group: |gᵀJg - J| for k = ±1, and for k = 0 the
/// first-row error plus |RᵀR - I|.
double group_constraint_error(const Mat4& g, int k);
/// Newton–Schulz style correction back onto the group.
Mat4 project_to_group(const Mat4& g, int k);

// ---- integration ----------------------------------------------------------

struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
};

struct IntegrateOptions {
  double t0 = 0.0;
  double tf = 20.0;
  Tolerances tol;
  /// Uniform output spacing; when empty every accepted step is recorded.
  std::optional<double> output_dt;
  bool with_frame = false;
  Mat4 g0 = Mat4::Identity();
  int reproject_every = 100;
  std::size_t max_steps = 5'000'000;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<State> states;
  std::vector<Mat4> frames;  // empty unless integrated with a frame
  std::vector<Invariants> invariants;
  Curvature k = Curvature::Flat;

  std::size_t size() const { return t.size(); }
  bool has_frames() const { return !frames.empty(); }
  /// Elastic curve point g(t) e1.
  Eigen::Vector4d curve_point(std::size_t i) const { return frames.at(i).col(0); }
  /// Throws std::logic_error when rows disagree in arity or times do not increase.
  void check() const;
};

class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

 private:
  double last_good_time_;
};

/// Adaptive Dormand–Prince 5(4) integration of the momentum equations, with
/// optional co-integration of dg/dt = g dH_p.
Trajectory integrate(const State& p0, const ModelParams& params, const IntegrateOptions& opts);

struct Drift {
  double H = 0, K2 = 0, K3 = 0;
  std::optional<double> K4sq;
  std::optional<Vec3> F;
  double max() const;
};

/// Max over samples of |Q(t) - Q(t0)| / max(1, |Q(t0)|) for each quantity.
Drift relative_drift(const Trajectory& traj);

// ---- limiting system with c1 = c2 -> infinity -----------------------------

/// Field of the limiting system. Requires the AxisymmetricInfinite mode and a3 = 0.
State limiting_m0_field(const State& p, const ModelParams& params);

/// |w - k a|² with w = h1 + i h2.
double m0_modulus(const State& p, const ModelParams& params);

/// Pendulum relation ½θ'² = H - k|a|² - R (a1 cos θ + a2 sin θ) with
/// w - k a = R e^{iθ}. Returns the scale-relative residual using energy E.
double m0_pendulum_residual(const State& p, const ModelParams& params, double energy);

}  // namespace etop::lie
