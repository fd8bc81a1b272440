#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "elastic_tops/common.hpp"

namespace etop::painleve {

using QReal = boost::multiprecision::cpp_bin_float_quad;
using QComplex = boost::multiprecision::cpp_complex_quad;

template <class T>
using V3 = std::array<T, 3>;
template <class T>
using V6 = std::array<T, 6>;
template <class T>
using M6 = std::array<std::array<T, 6>, 6>;

/// Parameters of the complexified system with c1 = c2 = c/m, c3 = c and a2 = 0.
struct RatioParams {
  double m = 0.5;
  double c = 1.0;
  double a1 = 1.0;
  double a3 = 0.0;
  int k = 0;
  int eps = 1;

  /// Throws std::invalid_argument for c <= 0, m < 0, bad k or ε, or a1 = a3 = 0.
  void validate() const;
};

enum class Family {
  A,  // r0 = 0
  B,  // h0 = 0
};
std::string to_string(Family f);

struct LeadingOrder {
  V3<Complex> K0{};  // (p0, q0, r0)
  V3<Complex> P0{};  // (f0, g0, h0)
  Family family = Family::A;
  int eps = 1;
  bool q0_free = false;
};

struct LeadingOrderSet {
  std::vector<LeadingOrder> solutions;
  std::vector<std::string> excluded;  // families with no solution, with the reason
};

/// Pole-order-one/two leading coefficients for the ε of `params`. When
/// 2m - 1 = 0 and a3 = 0 family B is a one-parameter family and `q0` picks
/// the member. Requires a1 ≠ 0 and m ≠ 1.
LeadingOrderSet leading_order_solutions(const RatioParams& params, Complex q0 = Complex{0.37, -0.21});

/// Max norm of -K0 - (K0 × W0 + P0 × a) and -2P0 - P0 × W0.
double leading_order_residual(const LeadingOrder& lo, const RatioParams& params);

/// The algebraic side relations every leading order satisfies, returned as
/// |f0² + g0² + h0²|, |m(p0 f0 + q0 g0) + r0 h0| and |(m²/c²)(p0² + q0²) + r0²/c² + 4|.
std::array<double, 3> leading_order_side_relations(const LeadingOrder& lo, const RatioParams& params);

/// The leading bracket P0 × W0 must not vanish for the assumed pole orders.
bool leading_bracket_nonzero(const LeadingOrder& lo, const RatioParams& params);

/// Stage matrix M(n) acting on (K_n, P_n). Defined for real or complex n.
M6<Complex> stage_matrix(Complex n, const RatioParams& params, const LeadingOrder& lo);

/// Determinant by cofactor expansion.
template <class T>
T determinant(const M6<T>& m);

/// Closed-form determinant of M(n) for the family of `lo`.
Complex delta_closed_form(Complex n, const RatioParams& params, Family family);

template <class T>
struct LinearSolve {
  int rank = 0;
  V6<T> particular{};
  std::vector<V6<T>> kernel;
  double inconsistency = 0;  // size of the unreachable part of the rhs, relative
};

/// Complete-pivot elimination of M x = b, with a kernel basis for singular M.
template <class T>
LinearSolve<T> solve_stage_system(const M6<T>& m, const V6<T>& b, double rank_tol = 1e-9);

struct RecursionStage {
  int n = 0;
  M6<Complex> matrix{};
  V6<Complex> rhs{};
  V3<Complex> K{}, P{};
  int kernel_dim = 0;
  double inconsistency = 0;
  bool obstructed = false;
};

/// Solves stage n given stages 0..n-1 in Ks, Ps. Kernel directions get the
/// coefficients in `free_values` (missing ones are zero).
RecursionStage recursion_stage(int n, const RatioParams& params, const LeadingOrder& lo,
                               const std::vector<V3<Complex>>& Ks, const std::vector<V3<Complex>>& Ps,
                               const std::vector<Complex>& free_values = {});

/// Max norm of M(n)(K_n, P_n) - rhs_n for given coefficient vectors, with Ks
/// and Ps holding stages 0..n.
double stage_equation_residual(int n, const RatioParams& params, const LeadingOrder& lo,
                               const std::vector<V3<Complex>>& Ks, const std::vector<V3<Complex>>& Ps);

struct Resonance {
  int n = 0;
  int kernel_dim = 0;
  double inconsistency = 0;
  bool consistent = true;
};

struct BranchSpectrum {
  Family family = Family::A;
  int eps = 1;
  bool q0_free = false;
  std::vector<Resonance> resonances;
  int stage0_constants = 0;
  int free_constants = 0;  // stage 0 plus kernels up to the first obstruction
  bool obstructed = false;
  std::string label() const;
};

/// Positive-integer resonances of every leading-order branch (both ε), with
/// kernel dimensions from the assembled matrices. Free constants are filled
/// with seeded generic values while the recursion is carried past each stage.
std::vector<BranchSpectrum> resonance_spectrum(const RatioParams& params, std::uint64_t seed = 7);

enum class MeromorphicClass {
  ZeroTranslation,  // (i) a = 0
  Lagrange,         // (ii) a1 = a2 = 0
  Spherical,        // (iii) m = 1
  Kowalewski,       // (iv) m = 1/2, a3 = 0
  NonMeromorphic,
};
std::string to_string(MeromorphicClass c);

struct Classification {
  MeromorphicClass cls = MeromorphicClass::NonMeromorphic;
  int free_constants = 0;  // best branch; 6 for the special classes
  int deficit = 0;         // 6 - free_constants
  std::string branch;      // best branch label, empty when not analysed
  std::string resonances;  // e.g. "1:1;2:1;3:1;4:1" for the best branch
};

Classification classify(const RatioParams& params, std::uint64_t seed = 7);

// ---- Laurent series -------------------------------------------------------

struct LaurentSolution {
  RatioParams params;
  LeadingOrder leading;
  int order = 0;                  // N
  std::vector<V3<QComplex>> K;    // K_0..K_N
  std::vector<V3<QComplex>> P;    // P_0..P_N
  std::map<int, std::vector<Complex>> free_values;
  std::map<int, int> kernel_dims;
};

class ObstructionError : public std::runtime_error {
 public:
  ObstructionError(const std::string& what, int stage) : std::runtime_error(what), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

/// Builds K_0..K_N and P_0..P_N in 113-bit arithmetic. Throws ObstructionError
/// when a singular stage has an inconsistent right-hand side.
LaurentSolution laurent_expand(const RatioParams& params, const LeadingOrder& lo,
                               const std::map<int, std::vector<Complex>>& free_values, int order);

struct SeriesResidualReport {
  std::vector<double> t;
  std::vector<double> residual;
  double slope = 0;  // least-squares slope of log residual against log t
};

/// Residual of the complexified equations for the truncated series at the
/// given real times.
SeriesResidualReport series_residual(const LaurentSolution& sol, const std::vector<double>& t);

/// Laurent coefficients (in powers of t relative to the leading pole) of the
/// energy, G = ⟨P,P⟩ + k⟨K,K⟩ and J = ⟨P,K⟩.
struct SeriesInvariants {
  std::vector<Complex> energy;  // coefficient n multiplies t^(n-2)
  std::vector<Complex> G;       // t^(n-4)
  std::vector<Complex> J;       // t^(n-3)
};
SeriesInvariants series_invariants(const LaurentSolution& sol);

/// ⟨P(t), K(t)⟩ from the truncated series at a real time t.
Complex series_pk(const LaurentSolution& sol, double t);

}  // namespace etop::painleve
