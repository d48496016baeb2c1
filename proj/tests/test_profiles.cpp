#include <gtest/gtest.h>

#include "orrlab/profiles.hpp"
#include "support.hpp"

using namespace orrlab;
using testing_support::Gen;

namespace {

ShearProfile finite_profile(const std::string& name, ProfileParams params, std::size_t n = 257, std::size_t j = 4) {
  return ShearProfile::build(name, params, ChannelConfig::finite(n), j);
}

}  // namespace

TEST(Profiles, CouetteHasZeroCurvatureAndUnitShear) {
  const auto p = finite_profile("couette", {});
  for (double f : p.f_samples()) EXPECT_EQ(f, 0.0);
  for (double g : p.g_samples()) EXPECT_EQ(g, 1.0);
  EXPECT_EQ(p.bilip_lower(), 1.0);
  EXPECT_EQ(p.bilip_upper(), 1.0);
}

TEST(Profiles, ZeroAmplitudeBumpMatchesCouette) {
  const auto a = finite_profile("couette", {});
  const auto b = finite_profile("couette_bump", {0.0, 0.5, 0.2, 0.0});
  EXPECT_EQ(a.f_samples(), b.f_samples());
  EXPECT_EQ(a.g_samples(), b.g_samples());
}

TEST(Profiles, SinProfileCurvatureMatchesFiniteDifferencesOfU) {
  const double eps = 0.01, phase = 0.3;
  const auto p = finite_profile("couette_sin", {eps, 0.0, 1.0, phase}, 129);
  auto U = [&](double y) { return y + eps * (std::sin(2.0 * pi * y + phase) - std::sin(phase)); };
  const double h = 1e-4;
  const Grid grid = p.grid();
  double worst_f = 0.0, worst_g = 0.0;
  for (std::size_t i = 1; i + 1 < grid.n; ++i) {
    const double z = grid.z(i);
    const double y = testing_support::bisect(U, z, -0.1, 1.1);
    const double d2 = (U(y + h) - 2.0 * U(y) + U(y - h)) / (h * h);
    const double d1 = (U(y + h) - U(y - h)) / (2.0 * h);
    worst_f = std::max(worst_f, std::abs(p.f_samples()[i] - d2));
    worst_g = std::max(worst_g, std::abs(p.g_samples()[i] - d1));
  }
  EXPECT_LT(worst_f, 1e-6);
  EXPECT_LT(worst_g, 1e-6);
}

TEST(Profiles, DerivativeSupNormsMatchFiniteDifferences) {
  const auto p = finite_profile("couette_bump", {0.05, 0.5, 0.3, 0.0}, 257, 3);
  // sup |d_z f| and sup |d_z^2 f| by centered differences of f(z) on a fine grid.
  const double h = 1e-4;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 1; i < 4000; ++i) {
    const double z = i / 4000.0;
    if (z - h < 0.0 || z + h > 1.0) continue;
    s1 = std::max(s1, std::abs((p.f(z + h) - p.f(z - h)) / (2.0 * h)));
    s2 = std::max(s2, std::abs((p.f(z + h) - 2.0 * p.f(z) + p.f(z - h)) / (h * h)));
  }
  EXPECT_NEAR(p.f_deriv_sup()[1] / s1, 1.0, 2e-3);
  EXPECT_NEAR(p.f_deriv_sup()[2] / s2, 1.0, 2e-3);
}

TEST(Profiles, ShearStaysWithinBilipschitzBounds) {
  for (const char* name : {"couette_bump", "couette_sin", "couette_poly"}) {
    for (double eps : {0.0, 0.01, 0.05}) {
      const auto p = finite_profile(name, {eps, 0.5, 0.3, 0.7});
      EXPECT_GT(p.bilip_lower(), 0.0);
      for (double g : p.g_samples()) {
        EXPECT_GE(g, p.bilip_lower()) << name << " eps=" << eps;
        EXPECT_LE(g, p.bilip_upper()) << name << " eps=" << eps;
      }
    }
  }
}

TEST(Profiles, RejectsNonBilipschitzAmplitude) {
  try {
    finite_profile("couette_sin", {1.0, 0.0, 1.0, 0.0});
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("U'"), std::string::npos) << e.what();
  }
  EXPECT_THROW(finite_profile("poiseuille", {}), Error);
}

TEST(CompositeNorm, ZeroHigherDerivativesGiveZero) {
  const std::vector<double> d{0.7, 0.0, 0.0, 0.0, 0.0};
  EXPECT_EQ(composite_norm(d, 0), 0.7);
  for (std::size_t j = 1; j <= 4; ++j) EXPECT_EQ(composite_norm(d, j), 0.0);
}

TEST(CompositeNorm, UnitTableGivesOne) {
  const std::vector<double> d(9, 1.0);
  for (std::size_t j = 0; j <= 8; ++j) EXPECT_EQ(composite_norm(d, j), 1.0);
}

TEST(CompositeNorm, PowersOfTwoMatchEnumeration) {
  std::vector<double> d;
  for (int i = 0; i <= 8; ++i) d.push_back(std::pow(2.0, i));
  for (int j = 1; j <= 8; ++j) {
    EXPECT_DOUBLE_EQ(composite_norm(d, static_cast<std::size_t>(j)), testing_support::brute_composite(d, j));
    EXPECT_DOUBLE_EQ(composite_norm(d, static_cast<std::size_t>(j)), std::pow(2.0, j));
  }
}

TEST(CompositeNorm, RandomTablesMatchEnumeration) {
  Gen gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> d(9);
    for (auto& x : d) x = gen.uniform(0.0, 3.0);
    for (int j = 1; j <= 8; ++j)
      EXPECT_NEAR(composite_norm(d, static_cast<std::size_t>(j)), testing_support::brute_composite(d, j),
                  1e-12 * testing_support::brute_composite(d, j));
  }
}

TEST(CompositeNorm, SubmultiplicativeOnRandomTables) {
  Gen gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> d(9);
    for (auto& x : d) x = gen.uniform(0.0, 3.0);
    for (std::size_t j1 = 1; j1 <= 7; ++j1)
      for (std::size_t j2 = 1; j1 + j2 <= 8; ++j2)
        EXPECT_LE(composite_norm(d, j1) * composite_norm(d, j2), composite_norm(d, j1 + j2) * (1.0 + 1e-14));
    // With a zero-order factor the inequality needs d_0 <= 1.
    if (d[0] <= 1.0) {
      for (std::size_t j = 1; j <= 8; ++j) EXPECT_LE(composite_norm(d, 0) * composite_norm(d, j), composite_norm(d, j));
    }
  }
}

TEST(CompositeNorm, RejectsNegativeEntries) {
  const std::vector<double> d{1.0, -0.5, 1.0};
  EXPECT_THROW(composite_norm(d, 2), Error);
}

TEST(PairNorm, CouetteValues) {
  const auto p = finite_profile("couette", {}, 65, 4);
  const auto t = CompositeNormTable::from_profile(p, 4);
  EXPECT_DOUBLE_EQ(t.pair_norm(0), 2.0);
  EXPECT_DOUBLE_EQ(t.pair_norm(1), 3.0);
}

TEST(PairNorm, AllZeroNormsGiveJPlusOne) {
  const std::vector<double> zero(7, 0.0);
  const auto t = CompositeNormTable::from_sups(zero, zero, 6);
  for (std::size_t j = 0; j <= 6; ++j) EXPECT_DOUBLE_EQ(t.pair_norm(j), static_cast<double>(j + 1));
}

TEST(PairNorm, MatchesExplicitConvolution) {
  Gen gen(13);
  std::vector<double> f(6), g(6);
  for (auto& x : f) x = gen.uniform(0.0, 2.0);
  for (auto& x : g) x = gen.uniform(0.0, 2.0);
  auto norm = [](const std::vector<double>& d, int j) { return j == 0 ? d[0] : testing_support::brute_composite(d, j); };
  const auto t = CompositeNormTable::from_sups(f, g, 5);
  for (int j = 0; j <= 5; ++j) {
    double s = 0.0;
    for (int a = 0; a <= j; ++a) s += (1.0 + norm(f, a)) * (1.0 + norm(g, j - a));
    EXPECT_NEAR(t.pair_norms[static_cast<std::size_t>(j)], s, 1e-12 * s);
  }
}

TEST(Smallness, CouetteMarginIsZero) {
  const auto ch = ChannelConfig::finite(65, 7.0);
  const auto p = ShearProfile::build("couette", {}, ch, 2);
  EXPECT_EQ(smallness_margin(p, ch), 0.0);
}

TEST(Smallness, ArithmeticFromSupNorms) {
  const std::vector<double> d{0.01, 0.02};
  EXPECT_NEAR(smallness_margin(d, 2.0 * pi), 0.03 * 2.0 * pi, 1e-15);
  EXPECT_NEAR(smallness_margin(d, 2.0 * pi), 0.1885, 1e-4);
}

TEST(Smallness, BumpMarginDoublesWithAmplitude) {
  // Both sup norms pick up O(epsilon^2) corrections through the inverse map.
  const auto ch = ChannelConfig::finite(257);
  const auto a = ShearProfile::build("couette_bump", {1e-5, 0.5, 0.2, 0.0}, ch, 2);
  const auto b = ShearProfile::build("couette_bump", {2e-5, 0.5, 0.2, 0.0}, ch, 2);
  EXPECT_NEAR(b.f_deriv_sup()[0] / a.f_deriv_sup()[0], 2.0, 1e-5);
  EXPECT_NEAR(smallness_margin(b, ch) / smallness_margin(a, ch), 2.0, 1e-3);
}

TEST(Vanishing, CompactBumpVanishesToAllOrders) {
  const Grid grid{0.0, 1.0, 257};
  std::vector<double> h(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) h[i] = bump((grid.z(i) - 0.5) / 0.2);
  const auto v = vanishing_order<double>(h, 4, 1e-8);
  for (bool b : v) EXPECT_TRUE(b);
}

TEST(Vanishing, QuarticPolynomialVanishesToFirstOrderOnly) {
  const Grid grid{0.0, 1.0, 513};
  std::vector<double> h(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) h[i] = std::pow(grid.z(i), 2) * std::pow(1.0 - grid.z(i), 2);
  const auto v = vanishing_order<double>(h, 2, 1e-4);
  EXPECT_TRUE(v[0]);
  EXPECT_TRUE(v[1]);
  EXPECT_FALSE(v[2]);
}

TEST(Vanishing, SineVanishesOnlyAtOrderZero) {
  const Grid grid{0.0, 1.0, 257};
  std::vector<double> h(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) h[i] = std::sin(2.0 * pi * grid.z(i));
  EXPECT_TRUE(vanishing_order<double>(h, 0, 1e-6)[0]);
  const auto v = vanishing_order<double>(h, 1, 1e-6);
  EXPECT_TRUE(v[0]);
  EXPECT_FALSE(v[1]);
}

TEST(Vanishing, RejectsTooCoarseGrids) {
  const std::vector<double> h(6, 0.0);
  try {
    vanishing_order<double>(h, 3, 1e-6);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("n_grid >= 9"), std::string::npos) << e.what();
  }
}
