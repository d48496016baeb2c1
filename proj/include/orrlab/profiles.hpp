#pragma once

// Shear profiles U(y), their Lagrangian-coordinate coefficients
// f = U''(U^{-1}(z)) and g = U'(U^{-1}(z)), derivative sup-norm tables and
// the composite norms built from them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "orrlab/core.hpp"
#include "orrlab/jet.hpp"
#include "orrlab/stencil.hpp"

namespace orrlab {

enum class ProfileFamily { Couette, CouetteBump, CouetteSin, CouettePoly };

/// Parameters shared by the registry families. Unused fields are ignored.
struct ProfileParams {
  double epsilon = 0.0;
  double center = 0.0;  // bump center y0
  double width = 1.0;   // bump half-width w
  double phase = 0.0;   // phase of the sin family
};

inline ProfileFamily profile_family(const std::string& name) {
  if (name == "couette") return ProfileFamily::Couette;
  if (name == "couette_bump") return ProfileFamily::CouetteBump;
  if (name == "couette_sin") return ProfileFamily::CouetteSin;
  if (name == "couette_poly") return ProfileFamily::CouettePoly;
  throw Error("profile: unknown registry name '" + name + "'");
}

/// Smooth compactly supported bump exp(-1/(1-x^2)) on (-1, 1).
inline double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x));
}

inline Jet bump(const Jet& x) {
  const double x0 = x.value();
  if (std::abs(x0) >= 1.0) return Jet(x.order(), 0.0);
  const Jet s = 1.0 + (-1.0) * (x * x);
  const Jet q = Jet(x.order(), -1.0) / s;
  if (q.value() < -700.0) return Jet(x.order(), 0.0);
  return exp(q);
}

class ShearProfile {
 public:
  /// Builds a registry profile sampled on the channel grid. Derivative
  /// sup-norm tables are filled up to order j_max.
  static ShearProfile build(const std::string& name, const ProfileParams& params,
                            const ChannelConfig& channel, std::size_t j_max = 8) {
    channel.validate();
    ShearProfile p;
    p.name_ = name;
    p.family_ = profile_family(name);
    p.params_ = params;
    p.grid_ = channel.grid();
    if (p.family_ == ProfileFamily::CouetteBump && !(params.width > 0.0))
      throw Error("profile: bump width must be positive");

    // Bilipschitz gate on a dense y-sample before any inversion.
    const Grid dense = p.dense_grid();
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < dense.n; ++i) {
      const double d = p.dU(dense.z(i));
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    if (!(lo >= 0.5 && hi <= 2.0)) {
      std::ostringstream os;
      os << "profile: not bilipschitz, U' ranges over [" << lo << ", " << hi
         << "], required within [0.5, 2]";
      throw Error(os.str());
    }

    p.f_samples_.resize(p.grid_.n);
    p.g_samples_.resize(p.grid_.n);
    for (std::size_t i = 0; i < p.grid_.n; ++i) {
      const double y = p.inverse(p.grid_.z(i));
      p.f_samples_[i] = p.d2U(y);
      p.g_samples_[i] = p.dU(y);
    }

    p.f_sup_.assign(j_max + 1, 0.0);
    p.g_sup_.assign(j_max + 1, 0.0);
    p.bilip_lower_ = 1e300;
    p.bilip_upper_ = -1e300;
    std::vector<std::size_t> f_arg(j_max + 1, 0), g_arg(j_max + 1, 0);
    for (std::size_t i = 0; i < dense.n; ++i) {
      const double z = dense.z(i);
      const auto [fd, gd] = p.derivatives_at(z, j_max);
      for (std::size_t j = 0; j <= j_max; ++j) {
        if (std::abs(fd[j]) > p.f_sup_[j]) p.f_sup_[j] = std::abs(fd[j]), f_arg[j] = i;
        if (std::abs(gd[j]) > p.g_sup_[j]) p.g_sup_[j] = std::abs(gd[j]), g_arg[j] = i;
      }
      p.bilip_lower_ = std::min(p.bilip_lower_, gd[0]);
      p.bilip_upper_ = std::max(p.bilip_upper_, gd[0]);
    }
    // Golden-section polish of each sampled maximum within its two neighbouring cells.
    auto polish = [&](std::size_t i, std::size_t j, bool of_f) {
      auto val = [&](double z) {
        const auto d = p.derivatives_at(z, j_max);
        return std::abs((of_f ? d.first : d.second)[j]);
      };
      const double r = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = dense.z(i == 0 ? 0 : i - 1), b = dense.z(std::min(i + 1, dense.n - 1));
      double c = b - r * (b - a), d = a + r * (b - a);
      double fc = val(c), fd = val(d), best = std::max(fc, fd);
      for (int it = 0; it < 40; ++it) {
        if (fc > fd) b = d, d = c, fd = fc, c = b - r * (b - a), fc = val(c);
        else a = c, c = d, fc = fd, d = a + r * (b - a), fd = val(d);
        best = std::max({best, fc, fd});
      }
      return best;
    };
    for (std::size_t j = 0; j <= j_max; ++j) {
      if (p.f_sup_[j] > 0.0) p.f_sup_[j] = std::max(p.f_sup_[j], polish(f_arg[j], j, true));
      if (p.g_sup_[j] > 0.0) p.g_sup_[j] = std::max(p.g_sup_[j], polish(g_arg[j], j, false));
    }
    for (double g : p.g_samples_) {
      p.bilip_lower_ = std::min(p.bilip_lower_, g);
      p.bilip_upper_ = std::max(p.bilip_upper_, g);
    }
    return p;
  }

  const std::string& name() const { return name_; }
  ProfileFamily family() const { return family_; }
  const ProfileParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }

  /// Taylor jet of U around y.
  Jet U_jet(double y, std::size_t order) const {
    const Jet Y = Jet::variable(y, order);
    const double eps = params_.epsilon;
    switch (family_) {
      case ProfileFamily::Couette:
        return Y;
      case ProfileFamily::CouetteBump: {
        const Jet x = (1.0 / params_.width) * (Y + (-params_.center));
        return Y + eps * bump(x);
      }
      case ProfileFamily::CouetteSin: {
        const Jet arg = 2.0 * pi * Y + params_.phase;
        const Jet s = sincos(arg).first;
        return Y + eps * (s + (-std::sin(params_.phase)));
      }
      case ProfileFamily::CouettePoly: {
        const Jet y2 = Y * Y, y4 = y2 * y2, y5 = y4 * Y, y6 = y5 * Y;
        return Y + eps * (y4 * (1.0 / 12.0) + y5 * (-1.0 / 10.0) + y6 * (1.0 / 30.0) +
                          Y * (-1.0 / 60.0));
      }
    }
    return Y;
  }

  double U(double y) const { return U_jet(y, 0).value(); }
  double dU(double y) const { return U_jet(y, 1)[1]; }
  double d2U(double y) const { return 2.0 * U_jet(y, 2)[2]; }

  /// U^{-1}(z) by Newton iteration.
  double inverse(double z) const {
    if (family_ == ProfileFamily::Couette || params_.epsilon == 0.0) return z;
    double y = z;
    for (int it = 0; it < 60; ++it) {
      const Jet j = U_jet(y, 1);
      const double step = (j.value() - z) / j[1];
      y -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(y))) break;
    }
    return y;
  }

  double f(double z) const { return d2U(inverse(z)); }
  double g(double z) const { return dU(inverse(z)); }

  /// z-derivatives of f and g at z up to order n, using d/dz = (1/U') d/dy.
  std::pair<std::vector<double>, std::vector<double>> derivatives_at(double z,
                                                                     std::size_t n) const {
    const double y = inverse(z);
    const Jet u = U_jet(y, n + 2);
    const Jet up = u.differentiate();
    std::vector<double> fd(n + 1), gd(n + 1);
    Jet cf = up.differentiate();
    Jet cg = up.truncated(n);
    fd[0] = cf.value();
    gd[0] = cg.value();
    for (std::size_t i = 1; i <= n; ++i) {
      cf = cf.differentiate() / up;
      cg = cg.differentiate() / up;
      fd[i] = cf.value();
      gd[i] = cg.value();
    }
    return {fd, gd};
  }

  const std::vector<double>& f_samples() const { return f_samples_; }
  const std::vector<double>& g_samples() const { return g_samples_; }
  /// d_i = sup |d^i f / dz^i|, i = 0..j_max
  const std::vector<double>& f_deriv_sup() const { return f_sup_; }
  const std::vector<double>& g_deriv_sup() const { return g_sup_; }
  double bilip_lower() const { return bilip_lower_; }
  double bilip_upper() const { return bilip_upper_; }

 private:
  Grid dense_grid() const {
    std::size_t n = std::min<std::size_t>(4 * (grid_.n - 1) + 1, 20001);
    return Grid{grid_.z_min, grid_.z_max, n};
  }

  std::string name_;
  ProfileFamily family_ = ProfileFamily::Couette;
  ProfileParams params_;
  Grid grid_;
  std::vector<double> f_samples_, g_samples_;
  std::vector<double> f_sup_, g_sup_;
  double bilip_lower_ = 1.0, bilip_upper_ = 1.0;
};

/// ||f||_j: largest product of derivative sup-norms over compositions of j
/// into positive parts; ||f||_0 = d_0.
inline double composite_norm(std::span<const double> d, std::size_t j) {
  if (d.size() <= j) throw Error("composite_norm: derivative table too short");
  for (std::size_t i = 0; i <= j; ++i)
    if (d[i] < 0.0) throw Error("composite_norm: negative derivative sup-norm");
  if (j == 0) return d[0];
  std::vector<double> m(j + 1, 0.0);
  m[0] = 1.0;
  for (std::size_t n = 1; n <= j; ++n)
    for (std::size_t i = 1; i <= n; ++i) m[n] = std::max(m[n], d[i] * m[n - i]);
  return std::max(m[j], d[j]);
}

struct CompositeNormTable {
  std::size_t j_max = 0;
  std::vector<double> f_norms, g_norms, pair_norms;

  static CompositeNormTable from_sups(std::span<const double> f_sup, std::span<const double> g_sup,
                                      std::size_t j_max) {
    CompositeNormTable t;
    t.j_max = j_max;
    t.f_norms.resize(j_max + 1);
    t.g_norms.resize(j_max + 1);
    t.pair_norms.resize(j_max + 1);
    for (std::size_t j = 0; j <= j_max; ++j) {
      t.f_norms[j] = composite_norm(f_sup, j);
      t.g_norms[j] = composite_norm(g_sup, j);
    }
    for (std::size_t j = 0; j <= j_max; ++j) t.pair_norms[j] = t.pair_norm(j);
    return t;
  }

  static CompositeNormTable from_profile(const ShearProfile& p, std::size_t j_max) {
    return from_sups(p.f_deriv_sup(), p.g_deriv_sup(), j_max);
  }

  /// ||(f,g)||_j = sum_{j1+j2=j} (1+||f||_{j1})(1+||g||_{j2})
  double pair_norm(std::size_t j) const {
    if (j > j_max) throw Error("pair_norm: index beyond table");
    double s = 0.0;
    for (std::size_t j1 = 0; j1 <= j; ++j1) s += (1.0 + f_norms[j1]) * (1.0 + g_norms[j - j1]);
    return s;
  }
};

/// (||f||_inf + ||f'||_inf) L, compared by callers against a threshold.
inline double smallness_margin(std::span<const double> f_sup, double L) {
  if (f_sup.size() < 2) throw Error("smallness_margin: derivative table needs order 1");
  return (f_sup[0] + f_sup[1]) * L;
}

inline double smallness_margin(const ShearProfile& p, const ChannelConfig& channel) {
  return smallness_margin(p.f_deriv_sup(), channel.L);
}

/// For each order j <= N, whether the j-th derivative vanishes at both ends
/// of a uniform [0,1] sample (relative to the sample's max modulus).
template <class T>
std::vector<bool> vanishing_order(std::span<const T> h, int N, double tol) {
  if (N < 0) throw Error("vanishing_order: N must be nonnegative");
  const std::size_t n = h.size();
  const std::size_t accuracy = static_cast<std::size_t>(N) + 2;
  const std::size_t required = 2 * static_cast<std::size_t>(N) + 3;
  if (n < required)
    throw Error("vanishing_order: grid too coarse for N = " + std::to_string(N) +
                ", requires n_grid >= " + std::to_string(required));
  const double dz = 1.0 / static_cast<double>(n - 1);
  double scale = 0.0;
  for (const auto& x : h) scale = std::max(scale, static_cast<double>(std::abs(x)));
  std::vector<bool> out(static_cast<std::size_t>(N) + 1, true);
  if (scale == 0.0) return out;
  for (int j = 0; j <= N; ++j) {
    const auto order = static_cast<std::size_t>(j);
    const T left = one_sided_derivative<T>(h, dz, order, accuracy, true);
    const T right = one_sided_derivative<T>(h, dz, order, accuracy, false);
    const double m = std::max(static_cast<double>(std::abs(left)), static_cast<double>(std::abs(right)));
    out[order] = m <= tol * scale;
  }
  return out;
}

}  // namespace orrlab
