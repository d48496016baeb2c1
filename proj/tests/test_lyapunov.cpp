#include <gtest/gtest.h>

#include "orrlab/lyapunov.hpp"
#include "support.hpp"

using namespace orrlab;
using testing_support::Gen;

namespace {

Spectrum spectrum_of(double k, std::vector<double> eta, std::vector<cplx> coef) {
  Spectrum s;
  s.k = k;
  s.eta = std::move(eta);
  s.coef = std::move(coef);
  return s;
}

CompositeNormTable small_table(std::size_t J) {
  std::vector<double> f(J + 1, 0.1), g(J + 1, 0.2);
  return CompositeNormTable::from_sups(f, g, J);
}

}  // namespace

TEST(Ladder, ZeroFieldHasZeroEnergies) {
  const auto ch = ChannelConfig::infinite(5.0, 65);
  const auto e = energy_ladder(make_field(1.0, ch, std::vector<cplx>(65)), small_table(3), LadderWeight{}, 3, 1.0);
  for (double v : e.values) EXPECT_EQ(v, 0.0);
  EXPECT_FALSE(e.underresolved);
  EXPECT_TRUE(e.sandwich_ok());
}

TEST(Ladder, SingleModeZerothEnergyIsWeightedMass) {
  LadderWeight w;
  const auto s = spectrum_of(1.5, {2.0}, {cplx(0.6, -0.8)});
  const auto e = energy_ladder(s, 0.7, small_table(2), w, 2, 1.0);
  EXPECT_DOUBLE_EQ(e.values[0], infinite_weight_factor(1.5, 2.0, 0.7, w.params));
}

TEST(Ladder, FirstEnergyByHand) {
  LadderWeight w;
  w.params.C_low = 0.8;
  const double k = 1.0, t = 1.2, C = 0.7;
  const std::vector<double> eta{-1.0, 3.0};
  const std::vector<cplx> a{cplx(1.0, 0.5), cplx(-0.2, 0.3)};
  const std::vector<double> fs{0.1, 0.2}, gs{0.3, 0.4};
  const auto table = CompositeNormTable::from_sups(fs, gs, 1);
  const auto e = energy_ladder(spectrum_of(k, eta, a), t, table, w, 1, C);
  double T0 = 0.0, T1 = 0.0;
  for (int m = 0; m < 2; ++m) {
    const double A = std::exp(0.5 * std::atan(0.8 * (eta[m] - k * t)));
    T0 += A * std::norm(a[m]);
    T1 += A * eta[m] * eta[m] * std::norm(a[m]);
  }
  const double P0 = (1.0 + 0.1) * (1.0 + 0.3);
  EXPECT_NEAR(e.values[0], T0, 1e-14);
  EXPECT_NEAR(e.values[1], 2.0 * T1 + 4.0 * C * P0 * P0 * T0, 1e-13);
  EXPECT_NEAR(e.coefficients[0], 4.0 * C * P0 * P0, 1e-14);
}

TEST(Ladder, RecursionMatchesDirectConvolution) {
  Gen gen(61);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> T(5), P(4);
    for (auto& x : T) x = gen.uniform(0.0, 2.0);
    for (auto& x : P) x = gen.uniform(1.0, 3.0);
    const double C = gen.uniform(0.1, 2.0);
    const auto E = ladder_from_terms(T, P, C);
    std::vector<double> ref{T[0]};
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t a = 0, b = j; a <= j; ++a, --b) s += P[a] * P[a] * ref[b];
      ref.push_back(2.0 * T[j + 1] + 4.0 * C * s);
    }
    for (std::size_t j = 0; j <= 4; ++j) EXPECT_NEAR(E[j], ref[j], 1e-12 * ref[j]);
  }
}

TEST(Ladder, SandwichHoldsForRandomSpectra) {
  Gen gen(62);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> eta;
    std::vector<cplx> a;
    for (int m = -8; m <= 8; ++m) {
      eta.push_back(0.5 * m);
      a.push_back(gen.complex_unit() * std::exp(-0.3 * std::abs(m)));
    }
    LadderWeight w;
    w.params.C_low = gen.uniform(0.5, 1.5);
    auto e = energy_ladder(spectrum_of(gen.uniform(-2.0, 2.0) + 3.0, eta, a), gen.uniform(0.0, 10.0),
                           small_table(4), w, 4, gen.uniform(0.5, 2.0));
    EXPECT_TRUE(e.sandwich_ok());
    e.values[0] = 0.5 * e.min_factor * e.seminorms2[0];
    EXPECT_FALSE(e.sandwich_ok());
  }
}

TEST(Ladder, TailMonitorFlagsUnderresolvedOrders) {
  std::vector<double> eta;
  std::vector<cplx> smooth, rough;
  for (int m = -20; m <= 20; ++m) {
    eta.push_back(m);
    smooth.push_back(std::exp(-0.5 * m * m));
    rough.push_back(1.0 / (1.0 + m * m));
  }
  LadderWeight w;
  const auto a = energy_ladder(spectrum_of(1.0, eta, smooth), 0.0, small_table(4), w, 4, 1.0);
  EXPECT_EQ(a.max_resolved_j, 4u);
  EXPECT_FALSE(a.underresolved);
  const auto b = energy_ladder(spectrum_of(1.0, eta, rough), 0.0, small_table(4), w, 4, 1.0);
  EXPECT_LT(b.max_resolved_j, 4u);
  EXPECT_TRUE(b.underresolved);
}

TEST(Ladder, FiniteWeightNeedsIntegral) {
  LadderWeight w;
  w.kind = ChannelKind::Finite;
  const auto s = spectrum_of(1.0, {1.0}, {1.0});
  EXPECT_THROW(energy_ladder(s, 1.0, small_table(1), w, 1, 1.0), Error);
  WeightIntegral W(0.25, 0.25, 0.1);
  w.integral = &W;
  const auto e = energy_ladder(s, 1.0, small_table(1), w, 1, 1.0);
  EXPECT_DOUBLE_EQ(e.values[0], finite_weight_factor(1.0, 1.0, 1.0, W));
}

TEST(Monotonicity, DecreasingSeriesPasses) {
  const std::vector<double> t{0, 1, 2, 3};
  const auto r = monotonicity_report(t, {{4, 3, 2, 1}, {1, 1, 1, 1}}, 1e-12);
  EXPECT_FALSE(r.violated());
  EXPECT_DOUBLE_EQ(r.max_increment[0], -0.25);
  EXPECT_DOUBLE_EQ(r.max_increment[1], 0.0);
}

TEST(Monotonicity, ReportsFirstViolationPerOrder) {
  const std::vector<double> t{0, 1, 2, 3};
  const auto r = monotonicity_report(t, {{4, 3, 2, 1}, {1, 0.9, 1.0, 1.2}}, 1e-6);
  EXPECT_TRUE(r.violated());
  EXPECT_FALSE(r.first_violation[0].has_value());
  ASSERT_TRUE(r.first_violation[1].has_value());
  EXPECT_EQ(*r.first_violation[1], 2.0);
  EXPECT_NEAR(r.max_increment[1], 0.2, 1e-12);
  EXPECT_THROW(monotonicity_report(t, {{1, 2}}, 0.0), Error);
}

TEST(Monotonicity, SmallIncreasesWithinToleranceAreAccepted) {
  const std::vector<double> t{0, 1, 2};
  EXPECT_FALSE(monotonicity_report(t, {{1.0, 1.0 + 1e-9, 1.0}}, 1e-8).violated());
  EXPECT_TRUE(monotonicity_report(t, {{1.0, 1.0 + 1e-7, 1.0}}, 1e-8).violated());
}

TEST(Dissipation, FrozenSingleModeMatchesAnalyticRate) {
  // E(t) = A(t) |a|^2, dE/dt = -c C k A / (1 + C^2 (eta - k t)^2) |a|^2 and
  // N(t) = |a|^2 / (k^2 + C^2 (eta - kt)^2), so with k = C = 1 the ratio is c A(t).
  WeightParams w;
  const double eta = 3.0;
  std::vector<double> t, E, N;
  for (int i = 0; i <= 600; ++i) {
    t.push_back(0.01 * i);
    const double d = eta - t.back();
    E.push_back(infinite_weight_factor(1.0, eta, t.back(), w));
    N.push_back(1.0 / (1.0 + d * d));
  }
  const auto r = dissipation_residual(t, E, N);
  const double expected = w.c_exp * infinite_weight_factor(1.0, eta, t[t.size() - 2], w);
  EXPECT_NEAR(r.C_fit, expected, 1e-4);
  for (double res : r.residual) EXPECT_LE(res, 1e-12);
  EXPECT_LT(r.fd_error_estimate, 1e-3);
}

TEST(Dissipation, ZeroDissipationGivesInfiniteConstant) {
  const std::vector<double> t{0, 1, 2, 3, 4}, E(5, 2.0), N(5, 0.0);
  const auto r = dissipation_residual(t, E, N);
  EXPECT_TRUE(std::isinf(r.C_fit));
  EXPECT_GT(r.C_fit, 0.0);
}

TEST(Dissipation, RejectsCoarseCadenceAndShortSeries) {
  std::vector<double> t, E, N;
  for (int i = 0; i < 12; ++i) {
    t.push_back(2.0 * i);
    E.push_back(2.0 + std::cos(t.back()));
    N.push_back(1.0);
  }
  EXPECT_THROW(dissipation_residual(t, E, N), Error);
  const std::vector<double> s{0, 1, 2, 3};
  EXPECT_THROW(dissipation_residual(s, s, s), Error);
}

TEST(DecayFit, RecoversPowerLaw) {
  std::vector<double> t, v;
  for (int i = 1; i <= 200; ++i) {
    t.push_back(i);
    v.push_back(3.0 * std::pow(t.back(), -2.0));
  }
  const auto f = decay_fit(t, v, 10.0, 100.0);
  EXPECT_NEAR(f.alpha, -2.0, 1e-12);
  EXPECT_NEAR(f.log_amplitude, std::log(3.0), 1e-10);
  EXPECT_EQ(f.points, 91u);
  EXPECT_LT(f.residual_rms, 1e-12);
}

TEST(DecayFit, RejectsBadWindows) {
  const std::vector<double> t{0, 1, 2, 3}, v{1, 0, 1, 1}, ok{1, 1, 1, 1};
  EXPECT_THROW(decay_fit(t, v, 0.5, 2.5), Error);
  EXPECT_THROW(decay_fit(t, ok, 0.0, 3.0), Error);
  EXPECT_THROW(decay_fit(t, ok, 2.5, 3.0), Error);
  EXPECT_NEAR(boundary_trace_growth(std::vector<double>{1, 2, 4}, std::vector<double>{1, 4, 16}, 1, 4).alpha, 2.0, 1e-12);
}

TEST(Gevrey, ConstantFitExamples) {
  EXPECT_DOUBLE_EQ(gevrey_constant_fit(std::vector<double>{1, 1, 1, 1}, 1.0), 1.0);
  std::vector<double> fact{1, 1, 2, 6, 24, 120};
  EXPECT_DOUBLE_EQ(gevrey_constant_fit(fact, 1.0), 1.0);
  std::vector<double> geo;
  for (int j = 0; j <= 4; ++j) geo.push_back(std::pow(2.0, 1 + j));
  EXPECT_NEAR(gevrey_constant_fit(geo, 0.0), 2.0, 1e-15);
  EXPECT_THROW(gevrey_constant_fit(std::vector<double>{1, 1}, 1.0), Error);
}

TEST(Gevrey, RadiusScanBasics) {
  Gen gen(63);
  std::vector<double> eta;
  std::vector<cplx> a;
  for (int m = -10; m <= 10; ++m) {
    eta.push_back(m);
    a.push_back(gen.complex_unit());
  }
  const auto s = spectrum_of(1.0, eta, a);
  const std::vector<double> lams{0.0, 0.5};
  const auto v = gevrey_radius_scan(s, 1.0, lams);
  EXPECT_NEAR(v[0], std::log(std::pow(l2_norm(s), 2)), 1e-13);
  EXPECT_GT(v[1], v[0]);
  const auto z = gevrey_radius_scan(spectrum_of(1.0, {0.0}, {0.0}), 1.0, lams);
  EXPECT_TRUE(std::isinf(z[0]) && z[0] < 0.0);
  EXPECT_THROW(gevrey_radius_scan(s, 0.5, lams), Error);
}

TEST(Gevrey, RadiusScanSeparatesConvergentFromDivergentWeights) {
  // |a|^2 = exp(-2|eta|): the weighted sum converges for lambda < 2 only.
  auto scan = [](int band) {
    std::vector<double> eta;
    std::vector<cplx> a;
    for (int m = -band; m <= band; ++m) {
      eta.push_back(m);
      a.push_back(std::exp(-std::abs(m)));
    }
    return gevrey_radius_scan(spectrum_of(0.0, eta, a), 1.0, std::vector<double>{1.0, 3.0});
  };
  const auto narrow = scan(100), wide = scan(200);
  EXPECT_NEAR(narrow[0], wide[0], 1e-12);
  EXPECT_GT(wide[1] - narrow[1], 50.0);
}

TEST(GridNorm, SineExample) {
  const auto ch = ChannelConfig::finite(513);
  const auto u = sample_field(1.0, ch, [](double z) { return cplx(std::sin(pi * z), 0.0); });
  const double p2 = pi * pi;
  EXPECT_NEAR(grid_sobolev_norm(u, 0), std::sqrt(0.5), 1e-10);
  EXPECT_NEAR(grid_sobolev_norm(u, 2), std::sqrt(0.5 * (1.0 + p2 + p2 * p2)), 1e-5);
}
