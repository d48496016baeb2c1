#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace orrlab {

using cplx = std::complex<double>;
using std::numbers::pi;

/// Base error for every rejected precondition in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an integration step produces non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

enum class ChannelKind { Infinite, Finite };

inline const char* to_string(ChannelKind kind) {
  return kind == ChannelKind::Infinite ? "infinite" : "finite";
}

/// Uniform node grid on [z_min, z_max] including both end points.
///
/// The periodic view used by the spectral routines consists of the first
/// n - 1 nodes; the last node is the periodic image of the first.
struct Grid {
  double z_min = 0.0;
  double z_max = 1.0;
  std::size_t n = 0;

  double h() const { return (z_max - z_min) / static_cast<double>(n - 1); }
  double z(std::size_t i) const { return z_min + static_cast<double>(i) * h(); }
  double period() const { return z_max - z_min; }
  std::size_t periodic_size() const { return n - 1; }

  std::vector<double> nodes() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = z(i);
    return out;
  }

  bool operator==(const Grid&) const = default;
};

struct ChannelConfig {
  ChannelKind kind = ChannelKind::Finite;
  double L = 2.0 * pi;  // circumference in x
  double z_min = 0.0;
  double z_max = 1.0;
  std::size_t n_grid = 1025;
  std::optional<std::pair<double, double>> support_interval;
  std::optional<int> vanish_order;

  void validate() const {
    if (!(L > 0.0)) throw Error("channel: L must be positive");
    if (n_grid < 8) throw Error("channel: n_grid must be at least 8");
    if (kind == ChannelKind::Finite && (z_min != 0.0 || z_max != 1.0))
      throw Error("channel: finite channel requires z_min = 0 and z_max = 1");
    if (!(z_max > z_min)) throw Error("channel: z_max must exceed z_min");
    if (support_interval) {
      auto [a, b] = *support_interval;
      if (!(z_min < a && a < b && b < z_max))
        throw Error("channel: support_interval must be strictly interior");
    }
    if (vanish_order && *vanish_order < 0) throw Error("channel: vanish_order must be >= 0");
  }

  Grid grid() const { return Grid{z_min, z_max, n_grid}; }

  /// Wavenumber of the n-th x-mode, 2 pi n / L.
  double wavenumber(int mode) const { return 2.0 * pi * mode / L; }

  static ChannelConfig finite(std::size_t n, double L = 2.0 * pi) {
    ChannelConfig c;
    c.kind = ChannelKind::Finite;
    c.L = L;
    c.n_grid = n;
    return c;
  }

  static ChannelConfig infinite(double half_width, std::size_t n, double L = 2.0 * pi) {
    ChannelConfig c;
    c.kind = ChannelKind::Infinite;
    c.L = L;
    c.z_min = -half_width;
    c.z_max = half_width;
    c.n_grid = n;
    return c;
  }
};

/// One x-Fourier mode of a field sampled on the z-grid.
struct ModeField {
  double k = 1.0;
  Grid grid;
  ChannelKind kind = ChannelKind::Finite;
  std::vector<cplx> values;
  double t = 0.0;

  std::size_t size() const { return values.size(); }
};

inline ModeField make_field(double k, const ChannelConfig& channel, std::vector<cplx> values,
                            double t = 0.0) {
  if (values.size() != channel.n_grid) throw Error("field: value count does not match n_grid");
  return ModeField{k, channel.grid(), channel.kind, std::move(values), t};
}

template <class F>
ModeField sample_field(double k, const ChannelConfig& channel, F&& fn, double t = 0.0) {
  Grid grid = channel.grid();
  std::vector<cplx> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = fn(grid.z(i));
  return ModeField{k, grid, channel.kind, std::move(v), t};
}

/// Japanese bracket sqrt(1 + x^2).
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

/// Trapezoid inner product int conj(u) v dz on the node grid.
inline cplx inner(const Grid& grid, const std::vector<cplx>& u, const std::vector<cplx>& v) {
  if (u.size() != grid.n || v.size() != grid.n) throw Error("inner: size mismatch");
  cplx s = 0.5 * (std::conj(u.front()) * v.front() + std::conj(u.back()) * v.back());
  for (std::size_t i = 1; i + 1 < grid.n; ++i) s += std::conj(u[i]) * v[i];
  return s * grid.h();
}

inline double l2_norm(const Grid& grid, const std::vector<cplx>& u) {
  return std::sqrt(std::max(0.0, inner(grid, u, u).real()));
}

inline double max_abs(const std::vector<cplx>& u) {
  double m = 0.0;
  for (const auto& x : u) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs(const std::vector<double>& u) {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace orrlab
