#include <gtest/gtest.h>

#include "elastic_tops/painleve.hpp"
#include "support/reference.hpp"

using namespace etop;
using namespace etop::painleve;
using reference::delta_a_ref;
using reference::delta_b_ref;

namespace {

const Complex I{0.0, 1.0};

RatioParams params(double m, double a1, double a3, int k = 0, int eps = 1, double c = 1.0) {
  RatioParams p;
  p.m = m, p.a1 = a1, p.a3 = a3, p.k = k, p.eps = eps, p.c = c;
  return p;
}

V3<Complex> cross(const V3<Complex>& a, const V3<Complex>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// -K0 = K0 × W0 + P0 × a and -2P0 = P0 × W0 with W0 = (m p0/c, m q0/c, r0/c).
double leading_residual_ref(const LeadingOrder& lo, const RatioParams& p) {
  const V3<Complex> W{p.m * lo.K0[0] / p.c, p.m * lo.K0[1] / p.c, lo.K0[2] / p.c};
  const V3<Complex> a{p.a1, 0.0, p.a3};
  const auto t1 = cross(lo.K0, W), t2 = cross(lo.P0, a), t3 = cross(lo.P0, W);
  double worst = 0;
  for (int i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs(-lo.K0[i] - t1[i] - t2[i]));
    worst = std::max(worst, std::abs(-2.0 * lo.P0[i] - t3[i]));
  }
  return worst;
}

LeadingOrder pick(const LeadingOrderSet& s, Family f) {
  for (const auto& lo : s.solutions) {
    if (lo.family == f) return lo;
  }
  throw std::runtime_error("family missing");
}

}  // namespace

TEST(Leading, FamilyAWorkedValues) {
  const auto p = params(0.5, 1, 0);
  const LeadingOrder lo = pick(leading_order_solutions(p), Family::A);
  EXPECT_LT(std::abs(lo.K0[1] - 4.0 * I), 1e-14);
  EXPECT_LT(std::abs(lo.P0[2] + 4.0 * I), 1e-14);
  EXPECT_LT(std::abs(lo.P0[0] - 4.0), 1e-14);
  EXPECT_EQ(lo.K0[0], Complex(0.0));
  EXPECT_EQ(lo.K0[2], Complex(0.0));
  EXPECT_LE(leading_residual_ref(lo, p), 1e-12);
  EXPECT_LE(leading_order_residual(lo, p), 1e-12);
}

TEST(Leading, FamilyBWorkedValues) {
  const auto p = params(2, 1, 1);
  const LeadingOrder lo = pick(leading_order_solutions(p), Family::B);
  EXPECT_LT(std::abs(lo.K0[1] - 2.0 / 3.0), 1e-14);
  EXPECT_LT(std::abs(lo.K0[0] + I * (2.0 / 3.0)), 1e-14);
  EXPECT_LT(std::abs(lo.K0[2] - 2.0 * I), 1e-14);
  EXPECT_LT(std::abs(lo.P0[0] - 2.0), 1e-14);
  EXPECT_LT(std::abs(lo.P0[1] - 2.0 * I), 1e-14);
  EXPECT_EQ(lo.P0[2], Complex(0.0));
  EXPECT_LE(leading_residual_ref(lo, p), 1e-12);
}

TEST(Leading, SideRelationsAndBracketOnRandomDraws) {
  Sampler rng(1);
  for (int n = 0; n < 50; ++n) {
    const auto p = params(rng.uniform(0.05, 2.5), rng.uniform(0.3, 2), rng.uniform(-1, 1), int(n % 3) - 1,
                          n % 2 ? 1 : -1, rng.uniform(0.5, 2));
    if (std::abs(p.m - 1) < 1e-3 || std::abs(2 * p.m - 1) < 1e-3) continue;
    for (const auto& lo : leading_order_solutions(p).solutions) {
      EXPECT_LE(leading_residual_ref(lo, p), 1e-12);
      for (double r : leading_order_side_relations(lo, p)) EXPECT_LE(r, 1e-12);
      EXPECT_TRUE(leading_bracket_nonzero(lo, p));
      EXPECT_EQ(std::norm(lo.P0[0] * lo.P0[0] + lo.P0[1] * lo.P0[1] + lo.P0[2] * lo.P0[2]), 0.0);
    }
  }
}

TEST(Leading, ResidualDetectsWrongValues) {
  const auto p = params(0.5, 1, 0);
  LeadingOrder lo = pick(leading_order_solutions(p), Family::A);
  LeadingOrder doubled = lo;
  for (auto& v : doubled.K0) v *= 2.0;
  for (auto& v : doubled.P0) v *= 2.0;
  EXPECT_GT(leading_order_residual(doubled, p), 1e-3);
  LeadingOrder no_p = lo;
  no_p.P0 = {};
  EXPECT_GT(leading_order_residual(no_p, p), 1e-3);
}

TEST(Leading, ExclusionsAndPreconditions) {
  // 2m - 1 = 0 with a3 != 0 has no family-B solution.
  const auto set = leading_order_solutions(params(0.5, 1, 0.3));
  for (const auto& lo : set.solutions) EXPECT_NE(lo.family, Family::B);
  EXPECT_FALSE(set.excluded.empty());
  // m = 0 keeps only family B.
  for (const auto& lo : leading_order_solutions(params(0, 1, 0.5)).solutions) EXPECT_EQ(lo.family, Family::B);
  EXPECT_THROW(leading_order_solutions(params(1, 1, 0)), std::invalid_argument);
  EXPECT_THROW(leading_order_solutions(params(0.7, 0, 1)), std::invalid_argument);
  EXPECT_THROW(params(0.7, 0, 0).validate(), std::invalid_argument);
}

TEST(Determinant, AssembledMatchesClosedForm) {
  Sampler rng(2);
  for (Family fam : {Family::A, Family::B}) {
    int draws = 0;
    while (draws < 20) {
      const auto p = params(rng.uniform(0.1, 2.0), rng.uniform(0.3, 2), rng.uniform(-1, 1), int(rng.uniform(-1, 2)),
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
        const Complex det = determinant(stage_matrix(double(n), p, *lo));
        const Complex want = delta_closed_form(double(n), p, fam);
        ASSERT_LE(std::abs(det - want), 1e-10 * (1 + std::abs(want))) << to_string(fam) << " n=" << n;
      }
      const Complex nn{2.37, 0.41};
      EXPECT_LE(std::abs(determinant(stage_matrix(nn, p, *lo)) - delta_closed_form(nn, p, fam)),
                1e-10 * (1 + std::abs(delta_closed_form(nn, p, fam))));
    }
  }
}

TEST(Determinant, ClosedFormsMatchReference) {
  for (double m : {0.3, 0.5, 1.7}) {
    for (Complex n : {Complex(1.0), Complex(2.5), Complex(5.0), Complex(0.3, 0.9)}) {
      EXPECT_LT(std::abs(delta_closed_form(n, params(m, 1, 0), Family::B) - delta_b_ref(n, m)), 1e-12);
      EXPECT_LT(std::abs(delta_closed_form(n, params(m, 1.3, 0), Family::A) - delta_a_ref(n, m)), 1e-10);
    }
  }
  // Second factor at n = 3: 4·1·(-1).
  const Complex d2 = (3.0 + 1.0) * (3.0 - 2.0) * (3.0 - 4.0);
  EXPECT_EQ(d2, Complex(-4.0));
  // Kowalewski family B: zeros exactly at 1, 2, 3, 4 among positive integers.
  for (int n = 1; n <= 10; ++n) {
    const bool zero = std::abs(delta_closed_form(double(n), params(0.5, 1, 0), Family::B)) < 1e-12;
    EXPECT_EQ(zero, n <= 4) << n;
  }
  // Family A, m = 1/2, a3 = 0: the first factor reduces to (n - 3)(n - 2)(n + 1).
  for (Complex n : {Complex(1.5), Complex(6.0), Complex(0.2, -0.7)}) {
    const Complex want = (n - 3.0) * (n - 2.0) * (n + 1.0) * (n + 1.0) * (n - 2.0) * (n - 4.0);
    EXPECT_LT(std::abs(delta_closed_form(n, params(0.5, 1, 0), Family::A) - want), 1e-12 * (1 + std::abs(want)));
  }
}

TEST(LinearSolve, FullRankAndSingular) {
  Sampler rng(3);
  M6<Complex> a{};
  V6<Complex> x{}, b{};
  for (auto& row : a)
    for (auto& v : row) v = rng.complex_normal();
  for (auto& v : x) v = rng.complex_normal();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) b[i] += a[i][j] * x[j];
  auto s = solve_stage_system(a, b);
  EXPECT_EQ(s.rank, 6);
  EXPECT_TRUE(s.kernel.empty());
  for (int i = 0; i < 6; ++i) EXPECT_LT(std::abs(s.particular[i] - x[i]), 1e-12);

  // Make two rows dependent: rank 4 with a two-dimensional kernel.
  a[4] = a[0];
  a[5] = a[1];
  for (int j = 0; j < 6; ++j) a[5][j] += a[2][j];
  V6<Complex> bs{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) bs[i] += a[i][j] * x[j];
  s = solve_stage_system(a, bs);
  EXPECT_EQ(s.rank, 4);
  ASSERT_EQ(s.kernel.size(), 2u);
  EXPECT_LT(s.inconsistency, 1e-12);
  for (const auto& k : s.kernel) {
    for (int i = 0; i < 6; ++i) {
      Complex acc = 0;
      for (int j = 0; j < 6; ++j) acc += a[i][j] * k[j];
      EXPECT_LT(std::abs(acc), 1e-12);
    }
  }
  bs[4] += 1.0;  // now inconsistent
  EXPECT_GT(solve_stage_system(a, bs).inconsistency, 1e-3);
}

TEST(Resonances, KowalewskiHasSixConstants) {
  for (int k : {-1, 0, 1}) {
    const auto spectra = resonance_spectrum(params(0.5, 1, 0, k));
    int best = 0;
    for (const auto& b : spectra) {
      if (b.family == Family::B) {
        EXPECT_EQ(b.stage0_constants, 2);
        std::vector<int> ns;
        for (const auto& r : b.resonances) {
          if (r.kernel_dim > 0) ns.push_back(r.n);
          EXPECT_TRUE(r.consistent);
        }
        EXPECT_EQ(ns, (std::vector<int>{1, 2, 3, 4}));
      }
      best = std::max(best, b.free_constants);
    }
    EXPECT_EQ(best, 6) << "k=" << k;
  }
}

TEST(Resonances, GenericAtMostFour) {
  for (double m : {2.0, 0.7, 0.3, 1.3}) {
    for (double a3 : {0.0, 0.2}) {
      for (const auto& b : resonance_spectrum(params(m, 1, a3))) {
        EXPECT_LE(b.free_constants, 4) << "m=" << m << " a3=" << a3 << " " << b.label();
        for (const auto& r : b.resonances) EXPECT_LE(r.kernel_dim, 1);
      }
    }
  }
}

TEST(Resonances, MZeroDoubleKernel) {
  bool seen = false;
  for (const auto& b : resonance_spectrum(params(0, 1, 0.5))) {
    ASSERT_EQ(b.family, Family::B);
    for (const auto& r : b.resonances) {
      if (r.n == 2) {
        EXPECT_EQ(r.kernel_dim, 2);
        seen = true;
      }
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Recursion, NonResonantStageIsUnique) {
  const auto p = params(0.5, 1, 0);
  const LeadingOrder lo = pick(leading_order_solutions(p), Family::B);
  std::vector<V3<Complex>> Ks{lo.K0}, Ps{lo.P0};
  for (int n = 1; n <= 5; ++n) {
    const auto st = recursion_stage(n, p, lo, Ks, Ps, {Complex(0.3, 0.1)});
    EXPECT_FALSE(st.obstructed);
    EXPECT_EQ(st.kernel_dim, n <= 4 ? 1 : 0) << n;
    Ks.push_back(st.K);
    Ps.push_back(st.P);
    EXPECT_LE(stage_equation_residual(n, p, lo, Ks, Ps), 1e-10);
  }
}

TEST(Classify, SpecialCasesAndKowalewski) {
  EXPECT_EQ(classify(params(0.7, 0, 0)).cls, MeromorphicClass::ZeroTranslation);
  EXPECT_EQ(classify(params(0.7, 0, 1)).cls, MeromorphicClass::Lagrange);
  EXPECT_EQ(classify(params(1, 1, 0.5)).cls, MeromorphicClass::Spherical);
  EXPECT_EQ(classify(params(0.5, 1, 0)).cls, MeromorphicClass::Kowalewski);
  const auto c = classify(params(0.7, 1, 0.2));
  EXPECT_EQ(c.cls, MeromorphicClass::NonMeromorphic);
  EXPECT_LE(c.free_constants, 4);
  EXPECT_EQ(c.deficit, 6 - c.free_constants);
}

TEST(Classify, GridAcceptsOnlyTheFourClasses) {
  for (int i = 0; i <= 20; ++i) {
    const double m = i / 10.0;
    for (double a3 : {0.0, 0.5}) {
      const auto c = classify(params(m, 1, a3));
      const bool kow = i == 5 && a3 == 0.0;
      if (i == 10) {
        EXPECT_EQ(c.cls, MeromorphicClass::Spherical);
      } else if (kow) {
        EXPECT_EQ(c.cls, MeromorphicClass::Kowalewski);
        EXPECT_EQ(c.free_constants, 6);
      } else {
        EXPECT_EQ(c.cls, MeromorphicClass::NonMeromorphic) << "m=" << m << " a3=" << a3;
        EXPECT_LT(c.free_constants, 6);
      }
    }
  }
}
