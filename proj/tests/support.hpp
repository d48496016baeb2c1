#pragma once

// Shared test helpers: seeded generators and small independent oracles.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace testing_support {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

/// Deterministic generator; doubles built from raw bits.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
  cplx complex_unit() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

 private:
  std::mt19937_64 rng_;
};

/// max over all compositions of j into positive parts of prod d[part], by
/// explicit enumeration.
inline double brute_composite(const std::vector<double>& d, int j) {
  double best = 0.0;
  std::function<void(int, double)> rec = [&](int left, double prod) {
    if (left == 0) {
      best = std::max(best, prod);
      return;
    }
    for (int part = 1; part <= left; ++part) rec(left - part, prod * d[static_cast<std::size_t>(part)]);
  };
  rec(j, 1.0);
  return best;
}

/// Root of a monotone increasing function by bisection.
inline double bisect(const std::function<double(double)>& F, double target, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace testing_support
