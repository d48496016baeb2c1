#pragma once

// Recursive energy ladders E_0..E_J, their monotonicity and dissipation
// checks, algebraic decay fits and Gevrey-constant fits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "orrlab/core.hpp"
#include "orrlab/profiles.hpp"
#include "orrlab/spectral.hpp"
#include "orrlab/stencil.hpp"

namespace orrlab {

/// E_0 = T_0, E_{j+1} = 2 T_{j+1} + 4C sum_{j1+j2=j} ||(f,g)||_{j1}^2 E_{j2},
/// where T_j = <d^j omega, A d^j omega>.
inline std::vector<double> ladder_from_terms(std::span<const double> terms,
                                             std::span<const double> pair_norms,
                                             double ladder_constant) {
  const std::size_t J = terms.size() - 1;
  if (J > 0 && pair_norms.size() < J) throw Error("energy_ladder: composite norm table too short");
  std::vector<double> E(J + 1);
  E[0] = terms[0];
  for (std::size_t j = 0; j < J; ++j) {
    double s = 0.0;
    for (std::size_t j1 = 0; j1 <= j; ++j1) s += pair_norms[j1] * pair_norms[j1] * E[j - j1];
    E[j + 1] = 2.0 * terms[j + 1] + 4.0 * ladder_constant * s;
  }
  return E;
}

struct EnergyLadder {
  std::size_t J = 0;
  double ladder_constant = 1.0;
  double t = 0.0;
  std::vector<double> values;        // E_0..E_J
  std::vector<double> terms;         // <d^j omega, A d^j omega>
  std::vector<double> seminorms2;    // ||d^j omega||^2
  std::vector<double> coefficients;  // 4 C ||(f,g)||_j^2
  double min_factor = 1.0, max_factor = 1.0;
  std::size_t max_resolved_j = 0;  // spectral tail monitor
  bool underresolved = false;      // J beyond the resolved order
  double dissipation_norm2 = 0.0;  // ||omega||_{H^-1_t}^2 or the finite-channel weight sum

  /// Lower and upper bounds of every E_j by the seminorms and ladder terms.
  bool sandwich_ok(double rel_tol = 1e-12) const {
    for (std::size_t j = 0; j <= J; ++j) {
      const double mult = j == 0 ? 1.0 : 2.0;
      const double lower = mult * min_factor * seminorms2[j];
      const double ladder = values[j] - mult * terms[j];
      const double upper = mult * max_factor * seminorms2[j] + ladder;
      const double slack = rel_tol * std::max(1e-300, values[j]);
      if (values[j] < lower - slack || values[j] > upper + slack) return false;
    }
    return true;
  }
};

/// Multiplier weight for either channel. The finite-channel variant needs
/// the cached weight integral.
struct LadderWeight {
  ChannelKind kind = ChannelKind::Infinite;
  WeightParams params;
  WeightIntegral* integral = nullptr;

  double factor(double k, double eta, double t) const {
    if (kind == ChannelKind::Infinite) return infinite_weight_factor(k, eta, t, params);
    if (!integral) throw Error("energy_ladder: finite channel needs a weight integral");
    return finite_weight_factor(k, eta, t, *integral);
  }

  /// Per-frequency dissipation weight used for the fitted constant.
  double dissipation(double k, double eta, double t) const {
    if (kind == ChannelKind::Infinite) {
      const double d = eta - k * t;
      return 1.0 / (k * k + params.C_low * params.C_low * d * d);
    }
    return finite_dissipation_weight(k, eta, t, params.beta, params.gamma);
  }
};

inline EnergyLadder energy_ladder(const Spectrum& s, double t, const CompositeNormTable& table,
                                  const LadderWeight& weight, std::size_t J,
                                  double ladder_constant) {
  EnergyLadder out;
  out.J = J;
  out.t = t;
  out.ladder_constant = ladder_constant;
  out.terms.assign(J + 1, 0.0);
  out.seminorms2.assign(J + 1, 0.0);
  std::vector<double> tail(J + 1, 0.0);
  double eta_max = 0.0;
  for (double e : s.eta) eta_max = std::max(eta_max, std::abs(e));
  const double tail_from = 0.8 * eta_max;
  out.min_factor = std::numeric_limits<double>::infinity();
  out.max_factor = 0.0;
  for (std::size_t m = 0; m < s.size(); ++m) {
    const double eta = s.eta[m];
    const double a2 = std::norm(s.coef[m]);
    const double fac = weight.factor(s.k, eta, t);
    out.min_factor = std::min(out.min_factor, fac);
    out.max_factor = std::max(out.max_factor, fac);
    out.dissipation_norm2 += weight.dissipation(s.k, eta, t) * a2;
    double p = 1.0;
    for (std::size_t j = 0; j <= J; ++j) {
      out.terms[j] += fac * p * a2;
      out.seminorms2[j] += p * a2;
      if (std::abs(eta) > tail_from) tail[j] += p * a2;
      p *= eta * eta;
    }
  }
  out.max_resolved_j = 0;
  for (std::size_t j = 0; j <= J; ++j) {
    const bool ok = out.seminorms2[j] == 0.0 || tail[j] < 1e-2 * out.seminorms2[j];
    if (!ok) break;
    out.max_resolved_j = j;
  }
  out.underresolved = out.max_resolved_j < J && out.seminorms2[0] > 0.0;
  for (std::size_t j = 0; j < J; ++j)
    out.coefficients.push_back(4.0 * ladder_constant * table.pair_norms.at(j) * table.pair_norms.at(j));
  out.values = ladder_from_terms(out.terms, table.pair_norms, ladder_constant);
  return out;
}

inline EnergyLadder energy_ladder(const ModeField& omega, const CompositeNormTable& table,
                                  const LadderWeight& weight, std::size_t J,
                                  double ladder_constant) {
  return energy_ladder(to_spectrum(omega), omega.t, table, weight, J, ladder_constant);
}

struct MonotonicityReport {
  std::vector<double> max_increment;                 // per j, relative
  std::vector<std::optional<double>> first_violation;  // per j
  double tolerance = 0.0;
  bool violated() const {
    for (const auto& v : first_violation)
      if (v) return true;
    return false;
  }
};

/// energies[j][snapshot]; increments are (E(t+D) - E(t)) / E(t).
inline MonotonicityReport monotonicity_report(std::span<const double> times,
                                              const std::vector<std::vector<double>>& energies,
                                              double tol) {
  MonotonicityReport r;
  r.tolerance = tol;
  for (const auto& series : energies) {
    if (series.size() != times.size()) throw Error("monotonicity_report: series length mismatch");
    double worst = -std::numeric_limits<double>::infinity();
    std::optional<double> first;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
      const double base = std::abs(series[i]);
      const double inc = base > 0.0 ? (series[i + 1] - series[i]) / base : (series[i + 1] > 0.0 ? 1.0 : 0.0);
      worst = std::max(worst, inc);
      if (inc > tol && !first) first = times[i + 1];
    }
    r.max_increment.push_back(series.size() > 1 ? worst : 0.0);
    r.first_violation.push_back(first);
  }
  return r;
}

struct DissipationResult {
  std::vector<double> times;     // interior snapshot times
  std::vector<double> dEdt;      // centered differences
  std::vector<double> residual;  // dE/dt + C_fit * N
  double C_fit = 0.0;            // +infinity when unconstrained
  double fd_error_estimate = 0.0;
};

/// Largest C keeping dE_0/dt + C N(t) <= 0 on centered differences, where N
/// is the dissipation norm series. Rejects cadences too coarse to
/// differentiate (relative error estimate above 10%).
inline DissipationResult dissipation_residual(std::span<const double> times,
                                              std::span<const double> E0,
                                              std::span<const double> N) {
  const std::size_t n = times.size();
  if (E0.size() != n || N.size() != n) throw Error("dissipation_residual: series length mismatch");
  if (n < 5) throw Error("dissipation_residual: need at least 5 snapshots");
  DissipationResult r;
  double dmax = 0.0, errmax = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d = (E0[i + 1] - E0[i - 1]) / (times[i + 1] - times[i - 1]);
    r.times.push_back(times[i]);
    r.dEdt.push_back(d);
    dmax = std::max(dmax, std::abs(d));
    if (i >= 2 && i + 2 < n) {
      const double d2 = (E0[i + 2] - E0[i - 2]) / (times[i + 2] - times[i - 2]);
      errmax = std::max(errmax, std::abs(d2 - d) / 3.0);
    }
  }
  r.fd_error_estimate = dmax > 0.0 ? errmax / dmax : 0.0;
  if (r.fd_error_estimate > 0.1) throw Error("dissipation_residual: snapshot cadence too coarse");
  r.C_fit = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.dEdt.size(); ++i) {
    const double nn = N[i + 1];
    if (nn > 0.0) r.C_fit = std::min(r.C_fit, -r.dEdt[i] / nn);
    else if (r.dEdt[i] > 0.0) r.C_fit = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < r.dEdt.size(); ++i)
    r.residual.push_back(std::isfinite(r.C_fit) ? r.dEdt[i] + r.C_fit * N[i + 1] : r.dEdt[i]);
  return r;
}

struct DecayFit {
  double alpha = 0.0;          // value ~ A t^alpha
  double log_amplitude = 0.0;
  double residual_rms = 0.0;   // in log space
  std::size_t points = 0;
};

/// Least-squares slope of log(value) against log(t) over [t_a, t_b].
inline DecayFit decay_fit(std::span<const double> t, std::span<const double> v, double t_a, double t_b) {
  if (t.size() != v.size()) throw Error("decay_fit: series length mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_a || t[i] > t_b) continue;
    if (!(v[i] > 0.0)) throw Error("decay_fit: nonpositive value in the fit window");
    if (!(t[i] > 0.0)) throw Error("decay_fit: window must exclude t <= 0");
    x.push_back(std::log(t[i]));
    y.push_back(std::log(v[i]));
  }
  if (x.size() < 2) throw Error("decay_fit: fewer than two points in the fit window");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error("decay_fit: degenerate window");
  DecayFit f;
  f.alpha = sxy / sxx;
  f.log_amplitude = my - f.alpha * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.log_amplitude + f.alpha * x[i]);
    ss += e * e;
  }
  f.residual_rms = std::sqrt(ss / n);
  f.points = x.size();
  return f;
}

/// Smallest C with norms[j] <= C^{1+j} (1+j)^{j s} for every j.
inline double gevrey_constant_fit(std::span<const double> norms, double s) {
  if (norms.size() < 3) throw Error("gevrey_constant_fit: need orders up to J >= 2");
  double C = 0.0;
  for (std::size_t j = 0; j < norms.size(); ++j) {
    const double jj = static_cast<double>(j);
    const double r = norms[j] / std::pow(1.0 + jj, jj * s);
    C = std::max(C, std::pow(r, 1.0 / (1.0 + jj)));
  }
  return C;
}

/// log sum_m exp(lambda <xi>^{1/s}) |coef_m|^2 with <xi> = sqrt(1+k^2+eta^2),
/// for every lambda in the grid. Returns -infinity for a zero field.
inline std::vector<double> gevrey_radius_scan(const Spectrum& sp, double s,
                                              std::span<const double> lambdas) {
  if (!(s >= 1.0)) throw Error("gevrey_radius_scan: s must be >= 1");
  std::vector<double> out;
  for (double lam : lambdas) {
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    for (std::size_t m = 0; m < sp.size(); ++m) {
      const double a2 = std::norm(sp.coef[m]);
      if (a2 == 0.0) continue;
      const double br = std::sqrt(1.0 + sp.k * sp.k + sp.eta[m] * sp.eta[m]);
      logs.push_back(lam * std::pow(br, 1.0 / s) + std::log(a2));
      mx = std::max(mx, logs.back());
    }
    if (logs.empty()) {
      out.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - mx);
    out.push_back(mx + std::log(acc));
  }
  return out;
}

/// sqrt(sum_{m<=j} ||d^m u||^2) on the node grid with finite differences
/// (no periodic extension); used as the H^j proxy in the finite channel.
inline double grid_sobolev_norm(const ModeField& u, std::size_t j) {
  double acc = 0.0;
  for (std::size_t m = 0; m <= j; ++m) {
    const auto d = m == 0 ? u.values : grid_derivative(u.values, u.grid.h(), m, m + 4);
    acc += std::pow(l2_norm(u.grid, d), 2);
  }
  return std::sqrt(acc);
}

/// Log-log growth slope of a norm series over a window (boundary probe).
inline DecayFit boundary_trace_growth(std::span<const double> t, std::span<const double> h2,
                                      double t_a, double t_b) {
  return decay_fit(t, h2, t_a, t_b);
}

}  // namespace orrlab
