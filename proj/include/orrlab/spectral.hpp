#pragma once

// Mode-resolved spectra, Sobolev and time-adapted norms, and the two
// arctan multiplier weights.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "orrlab/core.hpp"
#include "orrlab/fft.hpp"

namespace orrlab {

/// Fourier coefficients of the periodic view of a ModeField.
///
/// Normalization: coef[m] = sqrt(P)/M * sum_j u_j exp(-i eta_m z_j), so that
/// u(z) = sum_m coef[m] exp(i eta_m z) / sqrt(P) and
/// sum_m |coef[m]|^2 = h * sum_{j<M} |u_j|^2 (Parseval, exact).
/// Coefficients are stored in FFT order; eta[m] = 2 pi m' / P with the
/// signed index m'.
struct Spectrum {
  double k = 1.0;
  double t = 0.0;
  Grid grid;
  ChannelKind kind = ChannelKind::Finite;
  std::vector<double> eta;
  std::vector<cplx> coef;

  std::size_t size() const { return coef.size(); }
};

inline std::vector<double> frequencies(const Grid& grid) {
  const std::size_t M = grid.periodic_size();
  std::vector<double> eta(M);
  const double P = grid.period();
  for (std::size_t m = 0; m < M; ++m) {
    const double signed_m =
        m < (M + 1) / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(M);
    eta[m] = 2.0 * pi * signed_m / P;
  }
  return eta;
}

inline Spectrum to_spectrum(const ModeField& field) {
  const Grid& grid = field.grid;
  if (field.values.size() != grid.n) throw Error("to_spectrum: length mismatch");
  const std::size_t M = grid.periodic_size();
  Spectrum s{field.k, field.t, grid, field.kind, frequencies(grid), std::vector<cplx>(M)};
  fft_for(M)->forward(std::span<const cplx>(field.values.data(), M), s.coef);
  const double scale = std::sqrt(grid.period()) / static_cast<double>(M);
  for (std::size_t m = 0; m < M; ++m) s.coef[m] *= scale * std::polar(1.0, -s.eta[m] * grid.z_min);
  return s;
}

inline ModeField from_spectrum(const Spectrum& s) {
  const Grid& grid = s.grid;
  const std::size_t M = grid.periodic_size();
  if (s.coef.size() != M || s.eta.size() != M) throw Error("from_spectrum: length mismatch");
  std::vector<cplx> shifted(M);
  const double scale = 1.0 / std::sqrt(grid.period());
  for (std::size_t m = 0; m < M; ++m) shifted[m] = s.coef[m] * scale * std::polar(1.0, s.eta[m] * grid.z_min);
  ModeField f{s.k, grid, s.kind, std::vector<cplx>(grid.n), s.t};
  fft_for(M)->backward(shifted, std::span<cplx>(f.values.data(), M));
  f.values[M] = f.values[0];
  return f;
}

/// sum_m w(eta_m) |coef_m|^2
template <class W>
double weighted_sum(const Spectrum& s, W&& w) {
  double acc = 0.0;
  for (std::size_t m = 0; m < s.size(); ++m) acc += w(s.eta[m]) * std::norm(s.coef[m]);
  return acc;
}

inline double l2_norm(const Spectrum& s) {
  return std::sqrt(weighted_sum(s, [](double) { return 1.0; }));
}

/// Pointwise multiplication of the spectrum by m(eta).
template <class W>
Spectrum multiply(Spectrum s, W&& mult) {
  for (std::size_t m = 0; m < s.size(); ++m) s.coef[m] *= mult(s.eta[m]);
  return s;
}

/// Spectrum of d^j/dz^j.
inline Spectrum derivative(const Spectrum& s, int j) {
  return multiply(s, [j](double eta) { return std::pow(cplx(0.0, eta), j); });
}

inline cplx spectral_inner(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) throw Error("spectral_inner: size mismatch");
  cplx acc = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) acc += std::conj(a.coef[m]) * b.coef[m];
  return acc;
}

struct WeightParams {
  double c_exp = 0.5;  // arctan multiplier exponent, in (0,1)
  double C_low = 1.0;  // lower bound of g used in the H^1_t norm
  double beta = 0.25;
  double gamma = 0.25;
  double delta = 0.5;

  void validate() const {
    if (!(c_exp > 0.0 && c_exp < 1.0)) throw Error("weights: c_exp must lie in (0,1)");
    if (!(C_low > 0.0)) throw Error("weights: C_low must be positive");
    if (!(beta > 0.0 && gamma > 0.0)) throw Error("weights: beta and gamma must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw Error("weights: delta must lie in (0,1)");
  }
};

/// Sobolev norm sqrt(sum (k^2+eta^2)^j |u|^2), or with 1+k^2+eta^2 when
/// homogeneous is false.
inline double hj_norm(const Spectrum& s, int j, bool homogeneous) {
  if (j < 0) throw Error("hj_norm: negative order");
  const double k2 = s.k * s.k;
  const double shift = homogeneous ? 0.0 : 1.0;
  return std::sqrt(weighted_sum(s, [&](double eta) { return std::pow(shift + k2 + eta * eta, j); }));
}

inline double h1t_norm(const Spectrum& s, double t, const WeightParams& w) {
  const double k = s.k, C = w.C_low;
  return std::sqrt(weighted_sum(s, [&](double eta) {
    const double d = eta - k * t;
    return k * k + C * C * d * d;
  }));
}

inline double hm1t_weight_norm(const Spectrum& s, double t, const WeightParams& w) {
  const double k = s.k, C = w.C_low;
  return std::sqrt(weighted_sum(s, [&](double eta) {
    const double d = eta - k * t;
    return 1.0 / (k * k + C * C * d * d);
  }));
}

/// Couette stream multiplier k / (k^2 + (eta - k t)^2).
inline double orr_multiplier(double k, double eta, double t) {
  if (k == 0.0) throw Error("orr_multiplier: k must be nonzero");
  const double d = eta - k * t;
  return k / (k * k + d * d);
}

inline double sign_of(double k) { return k < 0.0 ? -1.0 : 1.0; }

/// exp(c arctan(C (eta - k t))), mirrored for k < 0 so that the factor is
/// non-increasing in t for either sign of k.
inline double infinite_weight_factor(double k, double eta, double t, const WeightParams& w) {
  return std::exp(w.c_exp * sign_of(k) * std::atan(w.C_low * (eta - k * t)));
}

/// d/dt of infinite_weight_factor.
inline double infinite_weight_rate(double k, double eta, double t, const WeightParams& w) {
  const double d = w.C_low * (eta - k * t);
  return -infinite_weight_factor(k, eta, t, w) * w.c_exp * w.C_low * std::abs(k) / (1.0 + d * d);
}

inline Spectrum apply_A_infinite(const Spectrum& s, double t, const WeightParams& w) {
  return multiply(s, [&](double eta) { return infinite_weight_factor(s.k, eta, t, w); });
}

inline ModeField apply_A_infinite(const ModeField& f, double t, const WeightParams& w) {
  return from_spectrum(apply_A_infinite(to_spectrum(f), t, w));
}

/// W(t; a) = int_0^t <tau>^{-2 beta} (1 + (a - tau)^2)^{-2 gamma} dtau, with
/// values cached per ray a at stations spaced station_dt apart and linear
/// interpolation between stations.
class WeightIntegral {
 public:
  WeightIntegral(double beta, double gamma, double station_dt = 0.01)
      : beta_(beta), gamma_(gamma), dt_(station_dt) {
    if (!(beta > 0.0 && gamma > 0.0)) throw Error("weight_integral: beta, gamma must be positive");
    if (!(station_dt > 0.0)) throw Error("weight_integral: station spacing must be positive");
  }

  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double station_dt() const { return dt_; }

  double integrand(double a, double tau) const {
    const double d = a - tau;
    return std::pow(1.0 + tau * tau, -beta_) * std::pow(1.0 + d * d, -2.0 * gamma_);
  }

  /// Adaptive Gauss-Kronrod quadrature on [t0, t1].
  double integrate(double a, double t0, double t1) const {
    if (t1 <= t0) return 0.0;
    double err = 0.0;
    auto f = [&](double tau) { return integrand(a, tau); };
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, t0, t1, 20, 1e-13, &err);
    if (!(err <= 1e-9)) throw Error("weight_integral: quadrature did not converge");
    return v;
  }

  /// W(infinity; a); finite since the integrand decays like tau^{-2(beta + 2 gamma)}.
  double limit(double a) const {
    if (!(2.0 * beta_ + 4.0 * gamma_ > 1.0)) throw Error("weight_integral: limit diverges");
    // Split past the peak; on the tail tau = split * v^{-q} with q = 1/(p-1)
    // turns the algebraic decay tau^{-p} into a bounded integrand on (0,1].
    const double split = std::max(a, 0.0) + 1.0;
    const double q = 1.0 / (2.0 * beta_ + 4.0 * gamma_ - 1.0);
    auto f = [&](double v) {
      if (v <= 0.0) return 0.0;
      const double tau = split * std::pow(v, -q);
      return integrand(a, tau) * split * q * std::pow(v, -q - 1.0);
    };
    double err = 0.0;
    const double tail = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 20, 1e-13, &err);
    if (!(err <= 1e-9)) throw Error("weight_integral: quadrature did not converge");
    return integrate(a, 0.0, split) + tail;
  }

  double operator()(double a, double t) {
    if (t < 0.0) throw Error("weight_integral: t must be nonnegative");
    if (t == 0.0) return 0.0;
    auto& table = cache_[a];
    if (table.empty()) table.push_back(0.0);
    const double pos = t / dt_;
    auto i = static_cast<std::size_t>(std::floor(pos));
    while (table.size() < i + 2) {
      const std::size_t s = table.size();
      const double t0 = static_cast<double>(s - 1) * dt_, t1 = static_cast<double>(s) * dt_;
      table.push_back(table.back() + integrate(a, t0, t1));
    }
    const double frac = pos - static_cast<double>(i);
    if (frac < 1e-9) return table[i];
    return table[i] + frac * (table[i + 1] - table[i]);
  }

 private:
  double beta_, gamma_, dt_;
  std::unordered_map<double, std::vector<double>> cache_;
};

inline double finite_weight_factor(double k, double eta, double t, WeightIntegral& W) {
  const double a = eta / k;
  return std::exp(std::atan(a - t) - W(a, t));
}

/// 1/(1+(eta/k-t)^2) + <t>^{-2 beta} (1+(eta/k-t)^2)^{-2 gamma}
inline double finite_dissipation_weight(double k, double eta, double t, double beta, double gamma) {
  const double d = eta / k - t;
  const double q = 1.0 + d * d;
  return 1.0 / q + std::pow(1.0 + t * t, -beta) * std::pow(q, -2.0 * gamma);
}

inline Spectrum apply_A_finite(const Spectrum& s, double t, WeightIntegral& W) {
  return multiply(s, [&](double eta) { return finite_weight_factor(s.k, eta, t, W); });
}

inline ModeField apply_A_finite(const ModeField& f, double t, WeightIntegral& W) {
  return from_spectrum(apply_A_finite(to_spectrum(f), t, W));
}

/// CSV dump (eta, re, im) with the normalization stated in the header line.
inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "# normalization: coef = sqrt(P)/M * sum_j u_j exp(-i eta z_j); P=" << s.grid.period()
     << " M=" << s.size() << " k=" << s.k << " t=" << s.t << "\n";
  os << "eta,re,im\n";
  os.precision(17);
  for (std::size_t m = 0; m < s.size(); ++m)
    os << s.eta[m] << ',' << s.coef[m].real() << ',' << s.coef[m].imag() << '\n';
}

}  // namespace orrlab
