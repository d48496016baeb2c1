#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "orrlab/core.hpp"

namespace orrlab {

/// Finite-difference weights for derivatives 0..max_order at x0 using the
/// nodes xs (Fornberg's recursion). Result is indexed [order][node].
inline std::vector<std::vector<double>> fd_weights(double x0, std::span<const double> xs,
                                                   std::size_t max_order) {
  const std::size_t n = xs.size();
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k)
        c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// One-sided estimate of the order-th derivative at the left (from_left) or
/// right end of a uniform sample, with `accuracy` extra points.
template <class T>
T one_sided_derivative(std::span<const T> samples, double h, std::size_t order,
                       std::size_t accuracy, bool from_left) {
  const std::size_t npts = order + accuracy;
  if (samples.size() < npts) throw Error("stencil: not enough samples for one-sided derivative");
  std::vector<double> xs(npts);
  for (std::size_t i = 0; i < npts; ++i) xs[i] = (from_left ? 1.0 : -1.0) * static_cast<double>(i) * h;
  const auto w = fd_weights(0.0, xs, order);
  T s{};
  for (std::size_t i = 0; i < npts; ++i) {
    const std::size_t idx = from_left ? i : samples.size() - 1 - i;
    s += w[order][i] * samples[idx];
  }
  return s;
}

/// Derivative of given order at every node of a uniform grid, using centered
/// stencils of width `width` in the interior and one-sided ones near the ends.
inline std::vector<cplx> grid_derivative(std::span<const cplx> u, double h, std::size_t order,
                                         std::size_t width) {
  const std::size_t n = u.size();
  if (width < order + 1 || width > n) throw Error("stencil: invalid stencil width");
  std::vector<cplx> out(n);
  const std::size_t half = width / 2;
  std::vector<double> xs(width);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t start = i >= half ? i - half : 0;
    if (start + width > n) start = n - width;
    for (std::size_t m = 0; m < width; ++m) xs[m] = static_cast<double>(start + m) * h;
    const auto w = fd_weights(static_cast<double>(i) * h, xs, order);
    cplx s = 0.0;
    for (std::size_t m = 0; m < width; ++m) s += w[order][m] * u[start + m];
    out[i] = s;
  }
  return out;
}

}  // namespace orrlab
