#pragma once

// Self-checks: quick invariant checks per module and the acceptance
// criteria runs. Every check reports module, name, observed vs bound.

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "orrlab/config.hpp"
#include "orrlab/elliptic.hpp"
#include "orrlab/evolve.hpp"
#include "orrlab/lyapunov.hpp"
#include "orrlab/profiles.hpp"
#include "orrlab/run.hpp"
#include "orrlab/spectral.hpp"
#include "orrlab/stencil.hpp"

namespace orrlab {

struct CheckResult {
  std::string module;
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

inline std::string format_check(const CheckResult& r) {
  std::string s = std::string(r.pass ? "PASS" : "FAIL") + "  [" + r.module + "] " + r.name +
                  "  observed=" + format_double(r.observed) + " bound=" + format_double(r.bound);
  if (!r.detail.empty()) s += "  (" + r.detail + ")";
  return s;
}

struct VerifyOptions {
  /// -1 flips the sign of the multiplier exponent; used to confirm the
  /// checks notice a broken weight.
  double weight_sign = 1.0;
  std::uint64_t seed = 20240601;
};

namespace detail {

inline RunConfig config_from(json j) {
  j["schema_version"] = schema_version;
  return parse_config(j);
}

/// Runs fn; exceptions become failed checks carrying the message.
inline CheckResult guarded_check(const std::string& module, const std::string& name,
                                 const std::function<CheckResult()>& fn) {
  try {
    CheckResult r = fn();
    r.module = module;
    r.name = name;
    return r;
  } catch (const std::exception& e) {
    return CheckResult{module, name, false, NAN, NAN, std::string("error: ") + e.what()};
  }
}

inline CheckResult at_most(double observed, double bound, std::string detail = {}) {
  return CheckResult{{}, {}, observed <= bound, observed, bound, std::move(detail)};
}

inline CheckResult at_least(double observed, double bound, std::string detail = {}) {
  return CheckResult{{}, {}, observed >= bound, observed, bound, std::move(detail)};
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::vector<cplx> random_sine_field(const Grid& grid, std::mt19937_64& rng, int modes) {
  std::vector<cplx> a(static_cast<std::size_t>(modes));
  for (auto& x : a) x = cplx(2.0 * unit_uniform(rng) - 1.0, 2.0 * unit_uniform(rng) - 1.0);
  std::vector<cplx> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i)
    for (int m = 0; m < modes; ++m) v[i] += a[static_cast<std::size_t>(m)] * std::sin((m + 1) * pi * grid.z(i));
  v.front() = v.back() = 0.0;
  return v;
}

/// Discrete H^1_t norm matching the Dirichlet finite-difference energy.
inline double discrete_h1t(const ModeField& v, double t, double c) {
  const Grid& g = v.grid;
  const double h = g.h();
  double mass = 0.0, grad = 0.0;
  std::vector<cplx> phi(g.n);
  for (std::size_t i = 0; i < g.n; ++i) phi[i] = v.values[i] * std::polar(1.0, -v.k * t * g.z(i));
  for (std::size_t i = 1; i + 1 < g.n; ++i) mass += std::norm(phi[i]);
  for (std::size_t i = 0; i + 1 < g.n; ++i) grad += std::norm((phi[i + 1] - phi[i]) / h);
  return std::sqrt(v.k * v.k * h * mass + c * c * h * grad);
}

/// Largest relative increment of E_j over a short Couette trajectory with
/// the (possibly tampered) infinite-channel weight.
inline double couette_ladder_increment(double weight_sign) {
  const ChannelConfig ch = ChannelConfig::infinite(10.0, 257);
  const auto profile = ShearProfile::build("couette", {}, ch, 4);
  const auto table = CompositeNormTable::from_profile(profile, 4);
  auto w0 = sample_field(1.0, ch, [](double z) { return cplx(std::exp(-0.5 * z * z), 0.0); });
  w0.values.back() = w0.values.front();
  LadderWeight weight;
  weight.kind = ChannelKind::Infinite;
  weight.params.c_exp = weight_sign * 0.5;
  const Spectrum s = to_spectrum(w0);
  std::vector<double> times;
  std::vector<std::vector<double>> E(5);
  for (int i = 0; i <= 50; ++i) {
    const double t = 0.1 * i;
    const auto ladder = energy_ladder(s, t, table, weight, 4, 1.0);
    times.push_back(t);
    for (std::size_t j = 0; j <= 4; ++j) E[j].push_back(ladder.values[j]);
  }
  const auto rep = monotonicity_report(times, E, 1e-8);
  return *std::max_element(rep.max_increment.begin(), rep.max_increment.end());
}

}  // namespace detail

/// Invariant checks of every module on small fixed-seed problems.
inline std::vector<CheckResult> quick_checks(const VerifyOptions& opt = {}) {
  using detail::at_least;
  using detail::at_most;
  using detail::guarded_check;
  std::vector<CheckResult> out;

  out.push_back(guarded_check("profiles", "couette composite norms vanish for j >= 1", [] {
    const auto p = ShearProfile::build("couette", {}, ChannelConfig::finite(65), 6);
    const auto t = CompositeNormTable::from_profile(p, 6);
    double worst = 0.0;
    for (std::size_t j = 1; j <= 6; ++j) worst = std::max({worst, t.f_norms[j], t.g_norms[j]});
    return at_most(worst, 1e-12);
  }));
  out.push_back(guarded_check("profiles", "composite norm recursion equals brute-force maximum", [&] {
    std::mt19937_64 rng(opt.seed);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> d(7);
      for (auto& x : d) x = 2.0 * unit_uniform(rng);
      for (std::size_t j = 1; j <= 6; ++j) {
        // Max over compositions of j of products of d.
        double brute = 0.0;
        std::function<void(std::size_t, double)> rec = [&](std::size_t left, double prod) {
          if (left == 0) {
            brute = std::max(brute, prod);
            return;
          }
          for (std::size_t part = 1; part <= left; ++part) rec(left - part, prod * d[part]);
        };
        rec(j, 1.0);
        worst = std::max(worst, std::abs(composite_norm(d, j) - brute) / brute);
      }
    }
    return at_most(worst, 1e-12);
  }));
  out.push_back(guarded_check("profiles", "smallness margin scales linearly in epsilon", [] {
    const auto ch = ChannelConfig::finite(257);
    const auto a = ShearProfile::build("couette_sin", {1e-5, 0.0, 1.0, 0.0}, ch, 2);
    const auto b = ShearProfile::build("couette_sin", {2e-5, 0.0, 1.0, 0.0}, ch, 2);
    const double ratio = smallness_margin(b, ch) / smallness_margin(a, ch);
    return at_most(std::abs(ratio - 2.0), 1e-3);
  }));

  out.push_back(guarded_check("spectral", "Parseval and round trip", [&] {
    std::mt19937_64 rng(opt.seed + 1);
    const auto ch = ChannelConfig::infinite(5.0, 129);
    auto f = make_field(1.0, ch, detail::random_sine_field(ch.grid(), rng, 8));
    f.values.back() = f.values.front();
    const auto s = to_spectrum(f);
    const auto back = from_spectrum(s);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back.values[i] - f.values[i]));
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) mass += std::norm(f.values[i]);
    mass *= ch.grid().h();
    const double par = std::abs(std::pow(l2_norm(s), 2) - mass) / mass;
    return at_most(std::max(err, par), 1e-12);
  }));
  out.push_back(guarded_check("spectral", "arctan weights non-increasing in t", [&] {
    std::mt19937_64 rng(opt.seed + 2);
    WeightParams w;
    w.c_exp = opt.weight_sign * w.c_exp;
    WeightIntegral W(w.beta, w.gamma, 0.05);
    double worst = -INFINITY;
    for (int trial = 0; trial < 200; ++trial) {
      const double k = (unit_uniform(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 3.0 * unit_uniform(rng));
      const double eta = 40.0 * (unit_uniform(rng) - 0.5);
      const double t = 20.0 * unit_uniform(rng);
      worst = std::max(worst, infinite_weight_factor(k, eta, t + 0.05, w) - infinite_weight_factor(k, eta, t, w));
      const double tf = 0.05 * std::floor(t / 0.05);
      worst = std::max(worst, finite_weight_factor(k, eta, tf + 0.05, W) - finite_weight_factor(k, eta, tf, W));
    }
    return at_most(worst, 0.0);
  }));
  out.push_back(guarded_check("spectral", "weight integral limit, closed form at a=0", [] {
    const WeightIntegral W(0.25, 0.25);
    const double exact = 0.5 * std::sqrt(pi) * std::tgamma(0.25) / std::tgamma(0.75);
    return at_most(std::abs(W.limit(0.0) - exact), 1e-9);
  }));

  out.push_back(guarded_check("elliptic", "apply-solve round trip, finite and periodic", [&] {
    std::mt19937_64 rng(opt.seed + 3);
    double worst = 0.0;
    for (auto ch : {ChannelConfig::finite(257), ChannelConfig::infinite(8.0, 257)}) {
      const auto prof = ch.kind == ChannelKind::Finite ? ShearProfile::build("couette_sin", {0.02, 0.0, 1.0, 0.0}, ch, 2)
                                                       : ShearProfile::build("couette_bump", {0.05, 0.0, 2.0, 0.0}, ch, 2);
      const auto op = EllipticOperator::assemble(prof, ch, 1.5);
      auto rhs = detail::random_sine_field(ch.grid(), rng, 8);
      if (ch.kind == ChannelKind::Infinite) rhs.back() = rhs.front();
      const double t = 3.0;
      const auto psi = op.solve(rhs, t);
      const auto back = op.apply(psi, t);
      double err = 0.0, scale = 0.0;
      for (std::size_t i = 1; i + 1 < rhs.size(); ++i) {
        err = std::max(err, std::abs(back[i] - rhs[i]));
        scale = std::max(scale, std::abs(rhs[i]));
      }
      worst = std::max(worst, err / scale);
    }
    return at_most(worst, 1e-9);
  }));
  out.push_back(guarded_check("elliptic", "Couette wall derivative of sin(pi z) two ways", [] {
    const auto ch = ChannelConfig::finite(513);
    const auto p = ShearProfile::build("couette", {}, ch, 2);
    const auto w = sample_field(1.0, ch, [](double z) { return cplx(std::sin(pi * z), 0.0); });
    const auto psi = solve_stream(EllipticOperator::assemble(p, ch, 1.0), w, 0.0);
    const auto [u0, u1] = homogeneous_solutions(p, ch, 1.0, 0.0);
    const auto a = neumann_data_fd(psi), b = neumann_data_integral(w, u0, u1, p);
    const double exact = -pi / (1.0 + pi * pi);
    return at_most(std::max({std::abs(a.neumann_0 - exact), std::abs(b.neumann_0 - exact),
                             std::abs(a.neumann_0 - b.neumann_0)}),
                   1e-4);
  }));
  out.push_back(guarded_check("elliptic", "dual norm: two evaluations and duality", [&] {
    std::mt19937_64 rng(opt.seed + 4);
    const auto ch = ChannelConfig::finite(129);
    WeightParams w;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const double t = 10.0 * unit_uniform(rng);
      const auto u = make_field(1.0, ch, detail::random_sine_field(ch.grid(), rng, 8));
      const auto v = make_field(1.0, ch, detail::random_sine_field(ch.grid(), rng, 8));
      const auto d = hm1t_dual_norm(u, t, w, ch);
      worst = std::max(worst, std::abs(d.value - d.via_h1t) / d.value);
      const double ratio = std::abs(inner(ch.grid(), u.values, v.values)) / (d.value * detail::discrete_h1t(v, t, w.C_low));
      worst = std::max(worst, ratio - 1.0);
    }
    return at_most(worst, 1e-8);
  }));

  out.push_back(guarded_check("evolve", "Couette vorticity frozen in the Lagrangian frame", [] {
    const auto ch = ChannelConfig::finite(129);
    const auto p = ShearProfile::build("couette", {}, ch, 2);
    const auto w = sample_field(1.0, ch, [](double z) { return cplx(std::sin(pi * z), std::cos(3.0 * z)); });
    Simulation sim(p, ch, {1.0}, {w.values});
    for (int i = 0; i < 50; ++i) sim.step_rk4(0.1);
    return at_most(max_abs([&] {
                     std::vector<cplx> d(w.size());
                     for (std::size_t i = 0; i < d.size(); ++i) d[i] = sim.omega(0).values[i] - w.values[i];
                     return d;
                   }()),
                   1e-14);
  }));

  out.push_back(guarded_check("lyapunov", "Couette energy ladder non-increasing", [&] {
    return at_most(detail::couette_ladder_increment(opt.weight_sign), 1e-8);
  }));
  out.push_back(guarded_check("lyapunov", "decay fit recovers synthetic power law", [] {
    std::vector<double> t, v;
    for (int i = 1; i <= 50; ++i) {
      t.push_back(i);
      v.push_back(3.0 * std::pow(i, -2.0));
    }
    return at_most(std::abs(decay_fit(t, v, 1.0, 50.0).alpha + 2.0), 1e-10);
  }));
  out.push_back(guarded_check("lyapunov", "Gevrey constant of a saturating sequence", [] {
    std::vector<double> n;
    for (int j = 0; j <= 5; ++j) n.push_back(std::pow(2.0, 1 + j) * std::pow(1.0 + j, j));
    return at_most(std::abs(gevrey_constant_fit(n, 1.0) - 2.0), 1e-12);
  }));

  out.push_back(guarded_check("cli", "materialized config round trip", [] {
    const auto c = detail::config_from({{"profile", {{"name", "couette_bump"}, {"epsilon", 0.001}}}});
    const json a = to_json(c);
    const json b = to_json(parse_config(a));
    return at_most(a == b ? 0.0 : 1.0, 0.0);
  }));
  out.push_back(guarded_check("cli", "unknown keys rejected", [] {
    try {
      detail::config_from({{"time", {{"dtt", 0.1}}}});
    } catch (const ConfigError&) {
      return at_most(0.0, 0.0);
    }
    return at_most(1.0, 0.0, "accepted a misspelled key");
  }));
  return out;
}

/// Runs that are shared between criteria are computed once.
class AcceptanceSuite {
 public:
  std::vector<CheckResult> run_all() {
    return {criterion1(), criterion2(), criterion3(), criterion4(), criterion5(),
            criterion6(), criterion7(), criterion8(), criterion9()};
  }

  CheckResult criterion1() {
    return detail::guarded_check("acceptance", "1 Couette oracle: frozen vorticity and stream spectrum", [] {
      const auto ch = ChannelConfig::infinite(20.0, 1024);
      const auto p = ShearProfile::build("couette", {}, ch, 2);
      auto w0 = sample_field(1.0, ch, [](double z) { return cplx(std::exp(-0.5 * z * z), 0.0); });
      w0.values.back() = w0.values.front();
      const auto t0 = std::chrono::steady_clock::now();
      Simulation sim(p, ch, {1.0}, {w0.values});
      const Spectrum s0 = to_spectrum(w0);
      double frozen = 0.0, spectrum = 0.0;
      for (int step = 1; step <= 10000; ++step) {
        sim.step_rk4(0.01);
        if (step % 100) continue;
        const double t = sim.time();
        const auto& w = sim.omega(0).values;
        double dev = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          dev = std::max(dev, std::abs(w[i] - w0.values[i]));
          scale = std::max(scale, std::abs(w0.values[i]));
        }
        frozen = std::max(frozen, dev / scale);
        const Spectrum sp = to_spectrum(sim.psi(0));
        double err = 0.0, mag = 0.0;
        for (std::size_t m = 0; m < sp.size(); ++m) {
          const cplx exact = -s0.coef[m] / (1.0 + std::pow(sp.eta[m] - t, 2));
          err = std::max(err, std::abs(sp.coef[m] - exact));
          mag = std::max(mag, std::abs(exact));
        }
        spectrum = std::max(spectrum, err / mag);
      }
      const double secs = detail::seconds_since(t0);
      const bool ok = frozen <= 1e-10 && spectrum <= 1e-8 && secs <= 10.0;
      return CheckResult{{}, {}, ok, spectrum, 1e-8,
                         "frozen deviation " + format_double(frozen) + " <= 1e-10, runtime " +
                             format_double(std::round(secs * 100) / 100) + " s <= 10 s"};
    });
  }

  CheckResult criterion2() {
    return detail::guarded_check("acceptance", "2 Orr decay rates of psi and shifted gradient", [] {
      const auto cfg = detail::config_from({{"profile", {{"name", "couette"}}},
                                            {"channel", {{"kind", "infinite"}, {"z_min", -5.0}, {"z_max", 5.0}, {"n_grid", 129}}},
                                            {"initial", {{"name", "constant"}}},
                                            {"time", {{"dt", 0.01}, {"t_end", 100.0}, {"snapshot_every", 0.5}}},
                                            {"fits", {{"decay_window", {10.0, 100.0}}}}});
      const auto r = execute(cfg, false);
      const double a = r.summary.at("decay_alpha_psi").get<double>();
      const double b = r.summary.at("decay_alpha_dpsi").get<double>();
      const double dev = std::max(std::abs(a + 2.0), std::abs(b + 1.0));
      return detail::at_most(dev, 0.2,
                             "alpha_psi " + format_double(a) + " vs -2, alpha_dpsi " + format_double(b) + " vs -1");
    });
  }

  CheckResult criterion3() {
    return detail::guarded_check("acceptance", "3 infinite-channel ladder monotone, dissipation positive", [] {
      const auto t0 = std::chrono::steady_clock::now();
      const auto cfg = detail::config_from(
          {{"profile", {{"name", "couette_bump"}, {"epsilon", 3e-4}, {"center", 0.0}, {"width", 4.0}}},
           {"channel", {{"kind", "infinite"}, {"z_min", -10.0}, {"z_max", 10.0}, {"n_grid", 1025}}},
           {"initial", {{"name", "gaussian"}, {"width", 1.0}}},
           {"ladder", {{"J", 4}, {"tol_mono", 1e-6}}},
           {"time", {{"dt", 0.01}, {"t_end", 50.0}, {"snapshot_every", 0.1}}},
           {"fits", {{"decay_window", {10.0, 50.0}}}}});
      const auto r = execute(cfg, false);
      const auto& s = r.summary;
      double inc = -INFINITY;
      for (const auto& x : s.at("mono_max_increment_j")) inc = std::max(inc, x.get<double>());
      const auto& diss = s.at("per_mode").at(0).at("dissipation");
      const bool diss_ok = diss.contains("C_fit") && diss.at("C_fit").is_number() && diss.at("C_fit").get<double>() > 0.0 &&
                           diss.at("max_residual").get<double>() <= 0.0;
      const double margin = s.at("margin").get<double>();
      const double resolved = s.at("per_mode").at(0).at("min_resolved_j").get<double>();
      const double secs = detail::seconds_since(t0);
      const bool ok = inc <= 1e-6 && diss_ok && margin <= 0.01 && resolved >= 4 && secs <= 120.0;
      return CheckResult{{}, {}, ok, inc, 1e-6,
                         "margin " + format_double(margin) + ", C_fit " + (diss.contains("C_fit") ? diss.at("C_fit").dump() : "n/a") +
                             ", resolved j " + format_double(resolved) + ", runtime " +
                             format_double(std::round(secs * 100) / 100) + " s"};
    });
  }

  CheckResult criterion4() {
    return detail::guarded_check("acceptance", "4 finite-channel compact support: ladder, Gevrey bound, support", [this] {
      const auto& r = compact_run();
      const auto& s = r.summary;
      const auto& m0 = s.at("per_mode").at(0);
      double inc = -INFINITY;
      for (const auto& x : s.at("mono_max_increment_j")) inc = std::max(inc, x.get<double>());
      const double ratio = s.at("gevrey_C_of_t").at("max_ratio").get<double>();
      const double drift = m0.at("support_drift_max").get<double>();
      const double margin = s.at("margin").get<double>();
      const bool ok = inc <= 1e-8 && ratio <= 2.0 && drift <= 1e-8 && margin <= 0.01;
      return CheckResult{{}, {}, ok, ratio, 2.0,
                         "max E_j increment " + format_double(inc) + ", support drift " + format_double(drift) +
                             ", margin " + format_double(margin)};
    });
  }

  CheckResult criterion5() {
    return detail::guarded_check("acceptance", "5 vanishing order N=1: fitted H^j growth constant", [] {
      const auto cfg = detail::config_from({{"profile", {{"name", "couette_poly"}, {"epsilon", 0.05}}},
                                            {"channel", {{"kind", "finite"}, {"n_grid", 513}, {"vanish_order", 1}}},
                                            {"initial", {{"name", "poly"}, {"power", 2}}},
                                            {"ladder", {{"J", 2}}},
                                            {"time", {{"dt", 0.01}, {"t_end", 50.0}, {"snapshot_every", 0.1}}},
                                            {"fits", {{"decay_window", {10.0, 50.0}}}}});
      const auto r = execute(cfg, false);
      const auto w0 = initial_fields(cfg).at(0);
      std::vector<double> omega_re;
      for (const auto& x : w0) omega_re.push_back(x.real());
      const auto vw = vanishing_order<double>(std::span<const double>(omega_re), 1, 1e-4);
      const auto& vf = r.summary.at("f_vanishing");
      const bool vanish = vw[0] && vw[1] && vf[0].get<bool>() && vf[1].get<bool>();
      double C = 0.0;
      for (int j = 0; j <= 1; ++j) {
        const auto h = r.series.column("m0_omega_h" + std::to_string(j));
        for (double x : h) C = std::max(C, std::pow(x / h.front(), 1.0 / (1.0 + j)));
      }
      auto res = detail::at_most(C, 10.0, std::string("f and omega_0 vanish to order 1: ") + (vanish ? "yes" : "no"));
      res.pass = res.pass && vanish;
      return res;
    });
  }

  CheckResult criterion6() {
    return detail::guarded_check("acceptance", "6 Neumann data: cross-method agreement, h^2 gap, wall decay", [] {
      const double exact = -pi / (1.0 + pi * pi);
      auto gap_at = [](std::size_t n, double t, double* integral0) {
        const auto ch = ChannelConfig::finite(n);
        const auto p = ShearProfile::build("couette", {}, ch, 2);
        const auto w = sample_field(1.0, ch, [](double z) { return cplx(std::sin(pi * z), 0.0); });
        const auto psi = solve_stream(EllipticOperator::assemble(p, ch, 1.0), w, t);
        const auto [u0, u1] = homogeneous_solutions(p, ch, 1.0, t);
        const auto a = neumann_data_fd(psi), b = neumann_data_integral(w, u0, u1, p);
        if (integral0) *integral0 = b.neumann_0.real();
        return std::max(std::abs(a.neumann_0 - b.neumann_0), std::abs(a.neumann_1 - b.neumann_1));
      };
      double integral0 = 0.0;
      const double gap512 = gap_at(512, 0.0, &integral0);
      // K = gap / h^2 over a t-grid at three resolutions.
      std::vector<double> K;
      for (std::size_t n : {129u, 257u, 513u}) {
        double worst = 0.0;
        for (double t : {0.0, 1.0, 2.0, 5.0, 10.0}) worst = std::max(worst, gap_at(n, t, nullptr));
        const double h = 1.0 / static_cast<double>(n - 1);
        K.push_back(worst / (h * h));
      }
      const bool k_ok = K[2] <= 1.5 * K[0];
      const auto cfg = detail::config_from({{"profile", {{"name", "couette"}}},
                                            {"channel", {{"kind", "finite"}, {"n_grid", 257}}},
                                            {"initial", {{"name", "sin"}, {"frequency", 1.0}}},
                                            {"ladder", {{"J", 2}}},
                                            {"time", {{"dt", 0.05}, {"t_end", 50.0}, {"snapshot_every", 0.5}}},
                                            {"fits", {{"decay_window", {5.0, 50.0}}}}});
      const auto r = execute(cfg, false);
      const auto& m0 = r.summary.at("per_mode").at(0);
      const double a0 = m0.at("neumann_decay_wall0").at("alpha").get<double>();
      const double a1 = m0.at("neumann_decay_wall1").at("alpha").get<double>();
      const bool ok = gap512 <= 1e-4 && k_ok && std::max(a0, a1) <= -0.8 && std::abs(integral0 - exact) <= 1e-4;
      return CheckResult{{}, {}, ok, gap512, 1e-4,
                         "integral d_z psi(0) " + format_double(integral0) + " vs " + format_double(exact) + "; K(h) " +
                             format_double(K[0]) + ", " + format_double(K[1]) + ", " + format_double(K[2]) +
                             "; wall decay exponents " + format_double(a0) + ", " + format_double(a1) + " <= -0.8"};
    });
  }

  CheckResult criterion7() {
    return detail::guarded_check("acceptance", "7 dual norms: duality and Fourier-weight comparison", [] {
      WeightParams w;
      auto fitted = [&](std::size_t n, double* duality) {
        std::mt19937_64 rng(7);
        const auto ch = ChannelConfig::finite(n);
        double c_fit = 0.0;
        for (int field = 0; field < 100; ++field) {
          const auto u = make_field(1.0, ch, detail::random_sine_field(ch.grid(), rng, 8));
          const auto v = make_field(1.0, ch, detail::random_sine_field(ch.grid(), rng, 8));
          for (int rep = 0; rep < 10; ++rep) {
            const double t = 20.0 * unit_uniform(rng);
            const auto d = hm1t_dual_norm(u, t, w, ch);
            if (d.discretization_failure) throw NumericalError("negative dual inner product");
            const double ratio =
                std::abs(inner(ch.grid(), u.values, v.values)) / (d.value * detail::discrete_h1t(v, t, w.C_low));
            *duality = std::max(*duality, ratio);
            const Spectrum s = to_spectrum(u);
            const double weight = weighted_sum(s, [&](double eta) { return 1.0 / (1.0 + std::pow(eta - t, 2)); });
            c_fit = std::max(c_fit, d.raw_inner / weight);
          }
        }
        return c_fit;
      };
      double duality = 0.0;
      const double c1 = fitted(257, &duality), c2 = fitted(513, &duality);
      const double drift = std::abs(c2 / c1 - 1.0);
      const bool ok = duality <= 1.0 + 1e-12 && drift <= 0.1;
      return CheckResult{{}, {}, ok, drift, 0.1,
                         "max duality ratio " + format_double(duality) + " <= 1; fitted c " + format_double(c1) +
                             " (n=257), " + format_double(c2) + " (n=513)"};
    });
  }

  CheckResult criterion8() {
    return detail::guarded_check("acceptance", "8 convergence orders: solve, RK4, wall stencils", [] {
      // Stream solve, nested grids.
      auto solve_on = [](std::size_t n) {
        const auto ch = ChannelConfig::finite(n);
        const auto p = ShearProfile::build("couette_sin", {0.05, 0.0, 1.0, 0.0}, ch, 2);
        const auto w = sample_field(1.0, ch, [](double z) { return cplx(std::exp(z) * std::cos(2.0 * z), std::sin(3.0 * z)); });
        return solve_stream(EllipticOperator::assemble(p, ch, 1.0), w, 1.0).values;
      };
      std::vector<std::vector<cplx>> sols;
      for (std::size_t n : {129u, 257u, 513u, 1025u}) sols.push_back(solve_on(n));
      auto nested_gap = [](const std::vector<cplx>& coarse, const std::vector<cplx>& fine) {
        double e = 0.0;
        for (std::size_t i = 0; i < coarse.size(); ++i) e = std::max(e, std::abs(coarse[i] - fine[2 * i]));
        return e;
      };
      const double e1 = nested_gap(sols[0], sols[1]), e2 = nested_gap(sols[1], sols[2]), e3 = nested_gap(sols[2], sols[3]);
      const double solve_order = std::log2(e2 / e3);
      const double solve_order_coarse = std::log2(e1 / e2);

      // RK4 in time at fixed grid.
      auto evolve_with = [](double dt) {
        const auto ch = ChannelConfig::finite(257);
        const auto p = ShearProfile::build("couette_bump", {0.01, 0.5, 0.2, 0.0}, ch, 2);
        const auto w = sample_field(1.0, ch, [](double z) { return cplx(std::sin(pi * z), 0.0); });
        Simulation sim(p, ch, {1.0}, {w.values});
        const int steps = static_cast<int>(std::lround(2.0 / dt));
        for (int i = 0; i < steps; ++i) sim.step_rk4(dt);
        return sim.omega(0).values;
      };
      std::vector<std::vector<cplx>> runs;
      for (double dt : {0.2, 0.1, 0.05, 0.025}) runs.push_back(evolve_with(dt));
      auto gap = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        double e = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
        return e;
      };
      const double r1 = gap(runs[0], runs[1]), r2 = gap(runs[1], runs[2]), r3 = gap(runs[2], runs[3]);
      const double rk_order = std::log2(r2 / r3);
      const double rk_order_coarse = std::log2(r1 / r2);

      // One-sided wall stencils on an analytic sample.
      auto stencil_error = [](std::size_t n, std::size_t order) {
        const auto ch = ChannelConfig::finite(n);
        const auto f = sample_field(1.0, ch, [](double z) { return cplx(std::exp(z) * std::sin(2.0 * z + 0.3), 0.0); });
        const double exact0 = order == 1 ? std::sin(0.3) + 2.0 * std::cos(0.3) : -3.0 * std::sin(0.3) + 4.0 * std::cos(0.3);
        return std::abs(wall_derivative(f, order, true) - exact0);
      };
      double st_lo = INFINITY, st_hi = -INFINITY;
      for (std::size_t order : {1u, 2u}) {
        const double o = std::log2(stencil_error(33, order) / stencil_error(65, order));
        st_lo = std::min(st_lo, o);
        st_hi = std::max(st_hi, o);
      }
      const bool ok = std::abs(solve_order - 2.0) <= 0.2 && std::abs(solve_order_coarse - 2.0) <= 0.2 &&
                      std::abs(rk_order - 4.0) <= 0.3 && std::abs(rk_order_coarse - 4.0) <= 0.3 &&
                      std::abs(st_lo - 4.0) <= 0.5 && std::abs(st_hi - 4.0) <= 0.5;
      return CheckResult{{}, {}, ok, solve_order, 2.0,
                         "solve orders " + format_double(solve_order_coarse) + ", " + format_double(solve_order) +
                             " (2 +- 0.2); RK4 orders " + format_double(rk_order_coarse) + ", " +
                             format_double(rk_order) + " (4 +- 0.3); stencil orders in [" + format_double(st_lo) +
                             ", " + format_double(st_hi) + "] (4 +- 0.5)"};
    });
  }

  CheckResult criterion9() {
    return detail::guarded_check("acceptance", "9 boundary probe: H^2 growth only with boundary-nonvanishing data", [this] {
      const auto cfg = detail::config_from(
          {{"profile", {{"name", "couette_sin"}, {"epsilon", 0.01}, {"phase", pi / 2.0}}},
           {"channel", {{"kind", "finite"}, {"n_grid", 513}}},
           {"initial", {{"name", "constant"}}},
           {"ladder", {{"J", 2}}},
           {"time", {{"dt", 0.01}, {"t_end", 50.0}, {"snapshot_every", 0.1}}},
           {"fits", {{"decay_window", {10.0, 50.0}}}}});
      const auto r = execute(cfg, false);
      const double probe = r.summary.at("per_mode").at(0).at("h2_growth").at("slope").get<double>();
      const double compact = compact_run().summary.at("per_mode").at(0).at("h2_growth").at("slope").get<double>();
      const bool ok = probe > 0.0 && std::abs(compact) <= 0.05;
      return CheckResult{{}, {}, ok, probe, 0.0,
                         "boundary-nonvanishing slope " + format_double(probe) + " > 0, compact slope " +
                             format_double(compact) + " within 0.05 of 0"};
    });
  }

 private:
  const RunOutcome& compact_run() {
    if (!compact_) {
      const auto cfg = detail::config_from(
          {{"profile", {{"name", "couette_bump"}, {"epsilon", 5e-8}, {"center", 0.5}, {"width", 0.2}}},
           {"channel", {{"kind", "finite"}, {"n_grid", 513}, {"support_interval", {0.3, 0.7}}}},
           {"initial", {{"name", "bump"}, {"center", 0.5}, {"width", 0.15}}},
           {"ladder", {{"J", 4}}},
           {"time", {{"dt", 0.01}, {"t_end", 50.0}, {"snapshot_every", 0.1}}},
           {"fits", {{"decay_window", {10.0, 50.0}}, {"gevrey_s", 1.0}}}});
      compact_ = execute(cfg, false);
    }
    return *compact_;
  }

  std::optional<RunOutcome> compact_;
};

}  // namespace orrlab
