#pragma once

// Experiment orchestration: initial data, the snapshot series, fits over
// stored series, summaries, and parameter sweeps.

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "orrlab/config.hpp"
#include "orrlab/elliptic.hpp"
#include "orrlab/evolve.hpp"
#include "orrlab/lyapunov.hpp"
#include "orrlab/parallel.hpp"
#include "orrlab/profiles.hpp"
#include "orrlab/spectral.hpp"

namespace orrlab {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error("series: cannot parse number '" + std::string(s) + "'");
  return x;
}

/// One row per snapshot, named columns.
struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool has(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
  }
  std::size_t index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error("series: missing column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }
  std::vector<double> column(const std::string& name) const {
    const std::size_t c = index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

inline void write_series_csv(const std::string& path, const Series& s) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (std::size_t c = 0; c < s.columns.size(); ++c) out << (c ? "," : "") << s.columns[c];
  out << '\n';
  for (const auto& r : s.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_double(r[c]);
    out << '\n';
  }
}

inline Series read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  Series s;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> parts;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) parts.push_back(cell);
    return parts;
  };
  if (!std::getline(in, line)) throw Error("series: empty file '" + path + "'");
  s.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line);
    if (parts.size() != s.columns.size()) throw Error("series: ragged row in '" + path + "'");
    std::vector<double> row;
    for (const auto& p : parts) row.push_back(parse_double(p));
    s.rows.push_back(std::move(row));
  }
  return s;
}

/// Uniform double in [0,1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Initial vorticity for every configured mode, as a function of z.
inline std::vector<std::vector<cplx>> initial_fields(const RunConfig& c) {
  const Grid grid = c.channel.grid();
  std::mt19937_64 rng(c.seed);
  std::vector<std::vector<cplx>> out;
  const auto& in = c.initial;
  const double span = grid.z_max - grid.z_min;
  for (std::size_t m = 0; m < c.modes.size(); ++m) {
    std::vector<double> coeffs;
    if (in.name == "random")
      for (int i = 0; i < in.count; ++i) coeffs.push_back(2.0 * unit_uniform(rng) - 1.0);
    std::vector<cplx> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
      const double z = grid.z(i);
      const double s = (z - grid.z_min) / span;
      cplx val = 0.0;
      if (in.name == "gaussian") {
        const double d = (z - in.center) / in.width;
        val = std::exp(-0.5 * d * d) * std::polar(1.0, in.frequency * z);
      } else if (in.name == "plane") {
        val = std::polar(1.0, in.frequency * z);
      } else if (in.name == "constant") {
        val = 1.0;
      } else if (in.name == "sin") {
        val = std::sin(in.frequency * pi * s);
      } else if (in.name == "bump") {
        val = bump((z - in.center) / in.width);
      } else if (in.name == "poly") {
        val = std::pow(s, in.power) * std::pow(1.0 - s, in.power) * (1.0 + 0.5 * std::sin(2.0 * pi * s));
      } else if (in.name == "random") {
        for (std::size_t q = 0; q < coeffs.size(); ++q)
          val += coeffs[q] * std::sin(static_cast<double>(q + 1) * pi * s);
      }
      v[i] = in.amplitude * val;
    }
    if (c.channel.kind == ChannelKind::Infinite) v.back() = v.front();
    out.push_back(std::move(v));
  }
  return out;
}

namespace detail {

inline std::string mode_prefix(std::size_t m) { return "m" + std::to_string(m) + "_"; }
inline std::string constant_tag(double c) { return "C" + format_double(c); }

}  // namespace detail

/// Column names a run writes, in order.
inline std::vector<std::string> series_columns(const RunConfig& c) {
  std::vector<std::string> cols{"t"};
  const bool finite = c.channel.kind == ChannelKind::Finite;
  for (std::size_t m = 0; m < c.modes.size(); ++m) {
    const auto p = detail::mode_prefix(m);
    cols.push_back(p + "omega_l2");
    for (std::size_t j = 0; j <= c.ladder.J; ++j) cols.push_back(p + "omega_h" + std::to_string(j));
    cols.push_back(p + "frozen_deviation");
    cols.push_back(p + "psi_l2");
    cols.push_back(p + "dpsi_l2");
    for (std::size_t j = 0; j <= c.ladder.J; ++j) cols.push_back(p + "E" + std::to_string(j));
    for (double extra : c.ladder.extra_constants)
      for (std::size_t j = 0; j <= c.ladder.J; ++j)
        cols.push_back(p + "E" + std::to_string(j) + "_" + detail::constant_tag(extra));
    cols.push_back(p + "dissipation");
    cols.push_back(p + "resolved_j");
    cols.push_back(p + "sandwich");
    if (finite && c.diagnostics.neumann) {
      cols.push_back(p + "dpsi_wall0");
      cols.push_back(p + "dpsi_wall1");
      cols.push_back(p + "neumann_fd_gap");
    }
    if (c.diagnostics.support_drift && c.channel.support_interval) cols.push_back(p + "support_drift");
    if (finite && c.diagnostics.boundary_probe) cols.push_back(p + "h2_grid");
  }
  return cols;
}

/// Per-mode snapshot evaluator; owns the finite-channel weight cache.
class SnapshotProbe {
 public:
  SnapshotProbe(const RunConfig& c, const ShearProfile& profile, const WeightParams& w)
      : cfg_(c), profile_(profile), table_(CompositeNormTable::from_profile(profile, std::max<std::size_t>(c.ladder.J, 1))),
        integral_(w.beta, w.gamma, c.time.snapshot_every) {
    weight_.kind = c.channel.kind;
    weight_.params = w;
    weight_.integral = &integral_;
  }
  SnapshotProbe(const SnapshotProbe&) = delete;

  void append(const Simulation& sim, std::size_t m, std::vector<double>& row) {
    const auto& c = cfg_;
    const bool finite = c.channel.kind == ChannelKind::Finite;
    const ModeField& w = sim.omega(m);
    const double t = sim.time();
    const Spectrum s = to_spectrum(w);
    row.push_back(l2_norm(w.grid, w.values));
    for (std::size_t j = 0; j <= c.ladder.J; ++j) row.push_back(hj_norm(s, static_cast<int>(j), false));

    const auto& w0 = sim.omega0(m).values;
    double dev = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < w0.size(); ++i) {
      dev = std::max(dev, std::abs(w.values[i] - w0[i]));
      scale = std::max(scale, std::abs(w0[i]));
    }
    row.push_back(scale > 0.0 ? dev / scale : dev);

    const ModeField psi = sim.psi(m);
    row.push_back(l2_norm(psi.grid, psi.values));
    row.push_back(shifted_gradient_norm(psi, t));

    const EnergyLadder ladder = energy_ladder(s, t, table_, weight_, c.ladder.J, c.ladder.constant);
    for (double e : ladder.values) row.push_back(e);
    for (double extra : c.ladder.extra_constants)
      for (double e : ladder_from_terms(ladder.terms, table_.pair_norms, extra)) row.push_back(e);
    row.push_back(ladder.dissipation_norm2);
    row.push_back(static_cast<double>(ladder.max_resolved_j));
    row.push_back(ladder.sandwich_ok() ? 1.0 : 0.0);

    if (finite && c.diagnostics.neumann) {
      const auto [u0, u1] = homogeneous_solutions(profile_, c.channel, w.k, t);
      const BoundaryData integral = neumann_data_integral(w, u0, u1, profile_);
      const BoundaryData fd = neumann_data_fd(psi);
      row.push_back(std::abs(integral.neumann_0));
      row.push_back(std::abs(integral.neumann_1));
      row.push_back(std::max(std::abs(fd.neumann_0 - integral.neumann_0), std::abs(fd.neumann_1 - integral.neumann_1)));
    }
    if (c.diagnostics.support_drift && c.channel.support_interval) {
      const auto [a, b] = *c.channel.support_interval;
      double drift = 0.0;
      for (std::size_t i = 0; i < w0.size(); ++i) {
        const double z = w.grid.z(i);
        if (z < a || z > b) drift = std::max(drift, std::abs(w.values[i] - w0[i]));
      }
      row.push_back(drift);
    }
    if (finite && c.diagnostics.boundary_probe) row.push_back(grid_sobolev_norm(w, 2));
  }

  /// ||(d_z - i k t) psi||: spectral in the periodic box, finite differences
  /// on the conjugated variable in the finite channel.
  static double shifted_gradient_norm(const ModeField& psi, double t) {
    if (psi.kind == ChannelKind::Infinite) {
      const Spectrum sp = to_spectrum(psi);
      return std::sqrt(weighted_sum(sp, [&](double eta) {
        const double d = eta - psi.k * t;
        return d * d;
      }));
    }
    std::vector<cplx> phi(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) phi[i] = psi.values[i] * std::polar(1.0, -psi.k * t * psi.grid.z(i));
    return l2_norm(psi.grid, grid_derivative(phi, psi.grid.h(), 1, 5));
  }

 private:
  const RunConfig& cfg_;
  const ShearProfile& profile_;
  CompositeNormTable table_;
  WeightIntegral integral_;
  LadderWeight weight_;
};

namespace detail {

inline json optional_number(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

template <class F>
json guarded(F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return json{{"error", e.what()}};
  }
}

}  // namespace detail

/// Names of columns the fits need that the series lacks.
inline std::vector<std::string> missing_columns(const Series& s, const RunConfig& c) {
  std::vector<std::string> missing;
  for (const auto& col : series_columns(c))
    if (!s.has(col)) missing.push_back(col);
  return missing;
}

/// Every series-derived result: decay, Gevrey, monotonicity, dissipation
/// and boundary-probe fits, per mode and with mode 0 mirrored at top level.
inline json fit_summary(const Series& s, const RunConfig& c) {
  const auto missing = missing_columns(s, c);
  if (!missing.empty()) throw Error("fit: missing columns: " + detail::join(missing, ", "));
  const auto t = s.column("t");
  const double ta = c.fits.window_a, tb = c.fits.window_b;
  const bool finite = c.channel.kind == ChannelKind::Finite;
  json per_mode = json::array();
  bool violation = false, sandwich = true;
  for (std::size_t m = 0; m < c.modes.size(); ++m) {
    const auto p = detail::mode_prefix(m);
    json r;
    r["mode"] = c.modes[m];
    r["k"] = c.channel.wavenumber(c.modes[m]);
    r["decay_psi"] = detail::guarded([&] {
      const auto f = decay_fit(t, s.column(p + "psi_l2"), ta, tb);
      return json{{"alpha", f.alpha}, {"residual", f.residual_rms}, {"points", f.points}};
    });
    r["decay_dpsi"] = detail::guarded([&] {
      const auto f = decay_fit(t, s.column(p + "dpsi_l2"), ta, tb);
      return json{{"alpha", f.alpha}, {"residual", f.residual_rms}, {"points", f.points}};
    });

    r["gevrey"] = detail::guarded([&] {
      std::vector<std::vector<double>> h;
      for (std::size_t j = 0; j <= c.ladder.J; ++j) h.push_back(s.column(p + "omega_h" + std::to_string(j)));
      std::vector<double> C;
      for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> norms;
        for (const auto& col : h) norms.push_back(col[i]);
        C.push_back(gevrey_constant_fit(norms, c.fits.gevrey_s));
      }
      const double C0 = C.front();
      const double Cmax = *std::max_element(C.begin(), C.end());
      const double ratio = C0 > 0.0 ? Cmax / C0 : (Cmax == 0.0 ? 1.0 : INFINITY);
      return json{{"s", c.fits.gevrey_s}, {"C0", C0}, {"C_max", Cmax}, {"max_ratio", detail::optional_number(ratio)}};
    });

    auto mono_for = [&](const std::string& suffix) {
      std::vector<std::vector<double>> E;
      for (std::size_t j = 0; j <= c.ladder.J; ++j) E.push_back(s.column(p + "E" + std::to_string(j) + suffix));
      const auto rep = monotonicity_report(t, E, c.ladder.tol_mono);
      json first = json::array();
      for (const auto& v : rep.first_violation) first.push_back(v ? json(*v) : json(nullptr));
      return std::pair{json{{"max_increment_j", rep.max_increment}, {"first_violation_j", first}, {"violated", rep.violated()}},
                       rep.violated()};
    };
    auto [main_mono, main_violated] = mono_for("");
    r["monotonicity"] = main_mono;
    violation = violation || main_violated;
    json by_constant = json::object();
    by_constant[format_double(c.ladder.constant)] = main_mono;
    for (double extra : c.ladder.extra_constants)
      by_constant[format_double(extra)] = mono_for("_" + detail::constant_tag(extra)).first;
    r["monotonicity_by_constant"] = by_constant;

    r["dissipation"] = detail::guarded([&] {
      const auto d = dissipation_residual(t, s.column(p + "E0"), s.column(p + "dissipation"));
      double worst = -INFINITY;
      for (double x : d.residual) worst = std::max(worst, x);
      return json{{"C_fit", detail::optional_number(d.C_fit)},
                  {"max_residual", detail::optional_number(worst)},
                  {"fd_error_estimate", d.fd_error_estimate}};
    });

    const auto sw = s.column(p + "sandwich");
    const bool sw_ok = std::all_of(sw.begin(), sw.end(), [](double x) { return x == 1.0; });
    sandwich = sandwich && sw_ok;
    r["sandwich_ok"] = sw_ok;
    const auto rj = s.column(p + "resolved_j");
    r["min_resolved_j"] = *std::min_element(rj.begin(), rj.end());
    const auto fz = s.column(p + "frozen_deviation");
    r["max_frozen_deviation"] = *std::max_element(fz.begin(), fz.end());

    if (finite && c.diagnostics.neumann) {
      for (int wall = 0; wall < 2; ++wall) {
        const std::string col = p + "dpsi_wall" + std::to_string(wall);
        r["neumann_decay_wall" + std::to_string(wall)] = detail::guarded([&] {
          const auto f = decay_fit(t, s.column(col), ta, tb);
          return json{{"alpha", f.alpha}, {"residual", f.residual_rms}};
        });
      }
      const auto gap = s.column(p + "neumann_fd_gap");
      r["neumann_fd_gap_max"] = *std::max_element(gap.begin(), gap.end());
    }
    if (c.diagnostics.support_drift && c.channel.support_interval) {
      const auto d = s.column(p + "support_drift");
      r["support_drift_max"] = *std::max_element(d.begin(), d.end());
    }
    if (finite && c.diagnostics.boundary_probe) {
      r["h2_growth"] = detail::guarded([&] {
        const auto f = boundary_trace_growth(t, s.column(p + "h2_grid"), ta, tb);
        return json{{"slope", f.alpha}, {"residual", f.residual_rms}};
      });
    }
    per_mode.push_back(r);
  }

  json out;
  out["per_mode"] = per_mode;
  const json& m0 = per_mode.at(0);
  auto pick = [](const json& j, const char* key) { return j.contains(key) ? j.at(key) : json(nullptr); };
  out["decay_alpha_psi"] = pick(m0.at("decay_psi"), "alpha");
  out["decay_alpha_dpsi"] = pick(m0.at("decay_dpsi"), "alpha");
  out["gevrey_C_of_t"] = m0.at("gevrey");
  out["mono_max_increment_j"] = m0.at("monotonicity").at("max_increment_j");
  out["dissipation_C_fit"] = pick(m0.at("dissipation"), "C_fit");
  out["monotonicity_violated"] = violation;
  out["sandwich_ok"] = sandwich;
  out["fit_window"] = {ta, tb};
  return out;
}

struct RunOutcome {
  Series series;
  json summary;
  bool violation = false;  // monotonicity flagged
  bool fatal = false;      // invariant failure that invalidates the run
};

/// Runs a configuration. Writes series.csv, summary.json,
/// config.materialized.json and snapshots/ when write_files is set.
inline RunOutcome execute(RunConfig cfg, bool write_files = true) {
  {
    auto errs = validate_config(cfg);
    if (!errs.empty()) throw ConfigError("invalid config: " + detail::join(errs, "; "));
  }
  const ShearProfile profile = ShearProfile::build(cfg.profile_name, cfg.profile, cfg.channel,
                                                   std::max<std::size_t>(cfg.ladder.J, 2));
  if (cfg.C_low_auto) {
    cfg.weights.C_low = profile.bilip_lower();
    cfg.C_low_auto = false;
  }
  cfg.weights.validate();

  std::vector<double> ks;
  for (int m : cfg.modes) ks.push_back(cfg.channel.wavenumber(m));
  Simulation sim(profile, cfg.channel, ks, initial_fields(cfg));

  namespace fs = std::filesystem;
  const fs::path dir(cfg.output.dir);
  if (write_files) {
    fs::create_directories(dir / "snapshots");
    std::ofstream(dir / "config.materialized.json") << to_json(cfg).dump(2) << '\n';
  }

  std::vector<std::unique_ptr<SnapshotProbe>> probes;
  for (std::size_t m = 0; m < ks.size(); ++m) probes.push_back(std::make_unique<SnapshotProbe>(cfg, profile, cfg.weights));

  RunOutcome out;
  out.series.columns = series_columns(cfg);
  const std::size_t steps = cfg.steps(), stride = cfg.snapshot_stride();
  const std::size_t n_snap = steps / stride;
  auto dump_fields = [&](std::size_t snap) {
    if (!write_files) return;
    const bool ends = snap == 0 || snap == n_snap;
    const bool strided = cfg.output.field_dump_stride > 0 && snap % cfg.output.field_dump_stride == 0;
    if (!ends && !strided) return;
    for (std::size_t m = 0; m < ks.size(); ++m) {
      char name[64];
      std::snprintf(name, sizeof(name), "omega_m%zu_s%06zu.csv", m, snap);
      std::ofstream f(dir / "snapshots" / name);
      const ModeField& w = sim.omega(m);
      f << "# k=" << format_double(w.k) << " t=" << format_double(w.t) << "\nz,re,im\n";
      for (std::size_t i = 0; i < w.size(); ++i)
        f << format_double(w.grid.z(i)) << ',' << format_double(w.values[i].real()) << ','
          << format_double(w.values[i].imag()) << '\n';
    }
  };
  auto record = [&](std::size_t snap) {
    std::vector<std::vector<double>> parts(ks.size());
    parallel_for(ks.size(), [&](std::size_t m) { probes[m]->append(sim, m, parts[m]); });
    std::vector<double> row{sim.time()};
    for (auto& p : parts) row.insert(row.end(), p.begin(), p.end());
    out.series.rows.push_back(std::move(row));
    dump_fields(snap);
  };

  record(0);
  for (std::size_t step = 1; step <= steps; ++step) {
    sim.step_rk4(cfg.time.dt);
    if (step % stride == 0) record(step / stride);
  }

  json summary;
  summary["profile"] = cfg.profile_name;
  summary["channel"] = to_string(cfg.channel.kind);
  summary["margin"] = smallness_margin(profile, cfg.channel);
  summary["smallness_threshold"] = cfg.diagnostics.smallness_threshold;
  summary["margin_below_threshold"] = summary["margin"].get<double>() <= cfg.diagnostics.smallness_threshold;
  summary["bilip_lower"] = profile.bilip_lower();
  summary["bilip_upper"] = profile.bilip_upper();
  summary["C_low"] = cfg.weights.C_low;
  if (cfg.channel.kind == ChannelKind::Finite) {
    const auto& f_vals = profile.f_samples();
    const int N = cfg.channel.vanish_order.value_or(0);
    if (cfg.channel.n_grid >= 2 * static_cast<std::size_t>(N) + 3) {
      const auto vf = vanishing_order<double>(std::span<const double>(f_vals), N, 1e-4);
      summary["f_vanishing"] = std::vector<bool>(vf.begin(), vf.end());
    }
  }
  summary["steps"] = steps;
  summary["snapshots"] = out.series.rows.size();
  json fits = fit_summary(out.series, cfg);
  summary.update(fits);
  out.violation = fits["monotonicity_violated"].get<bool>();
  out.fatal = !fits["sandwich_ok"].get<bool>();
  summary["status"] = out.fatal ? "fatal" : (out.violation ? "violation" : "ok");
  out.summary = summary;
  if (write_files) {
    write_series_csv((dir / "series.csv").string(), out.series);
    std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  }
  return out;
}

/// Recomputes the fits of a stored run with an optional new window and
/// Gevrey index, and rewrites summary.json.
inline json refit(const std::string& dir, std::optional<std::pair<double, double>> window,
                  std::optional<double> s) {
  namespace fs = std::filesystem;
  RunConfig cfg = load_config((fs::path(dir) / "config.materialized.json").string());
  if (window) {
    cfg.fits.window_a = window->first;
    cfg.fits.window_b = window->second;
  }
  if (s) cfg.fits.gevrey_s = *s;
  const Series series = read_series_csv((fs::path(dir) / "series.csv").string());
  json summary = json::object();
  const fs::path sp = fs::path(dir) / "summary.json";
  if (fs::exists(sp)) summary = read_json_file(sp.string());
  summary.update(fit_summary(series, cfg));
  std::ofstream(sp) << summary.dump(2) << '\n';
  return summary;
}

/// Sets a dotted key that already exists in the materialized config.
inline json set_parameter(json cfg, const std::string& dotted, const json& value) {
  json* node = &cfg;
  std::stringstream ss(dotted);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("sweep: empty parameter name");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i]))
      throw ConfigError("sweep: parameter '" + dotted + "' is not addressable");
    node = &node->at(parts[i]);
  }
  if (node->is_object()) throw ConfigError("sweep: parameter '" + dotted + "' names a section");
  *node = value;
  return cfg;
}

/// Parses one sweep value: JSON if it parses, a string otherwise.
inline json parse_sweep_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{"value", "margin", "mono_violated", "mono_max_increment",
                                             "dissipation_C_fit", "decay_alpha_psi", "decay_alpha_dpsi",
                                             "gevrey_max_ratio", "psi_l2_final", "convergence_ratio"};
  return cols;
}

/// One cell per value, each in its own subdirectory; writes sweep.csv in
/// the base output directory and returns its text.
inline std::string sweep(const RunConfig& base, const std::string& param, const std::vector<json>& values) {
  namespace fs = std::filesystem;
  RunConfig resolved = base;
  const json materialized = to_json(resolved);
  set_parameter(materialized, param, json(nullptr));  // addressability check even for an empty sweep
  std::vector<json> summaries(values.size());
  std::vector<double> finals(values.size(), NAN);
  parallel_for(values.size(), [&](std::size_t i) {
    json cell = set_parameter(materialized, param, values[i]);
    cell["output"]["dir"] = (fs::path(base.output.dir) / ("cell_" + std::to_string(i))).string();
    const RunConfig rc = parse_config(cell);
    const RunOutcome r = execute(rc, true);
    summaries[i] = r.summary;
    finals[i] = r.series.rows.back()[r.series.index("m0_psi_l2")];
  });
  auto num = [](const json& j) -> std::string {
    if (j.is_number()) return format_double(j.get<double>());
    if (j.is_boolean()) return j.get<bool>() ? "1" : "0";
    return "nan";
  };
  std::ostringstream os;
  os << detail::join(sweep_columns(), ",") << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    const json& s = summaries[i];
    double max_inc = -INFINITY;
    for (const auto& x : s["mono_max_increment_j"]) max_inc = std::max(max_inc, x.get<double>());
    double ratio = NAN;
    if (i >= 2) {
      const double d1 = finals[i - 1] - finals[i - 2], d2 = finals[i] - finals[i - 1];
      if (d2 != 0.0) ratio = std::abs(d1 / d2);
    }
    const json& gev = s["gevrey_C_of_t"];
    os << (values[i].is_string() ? values[i].get<std::string>() : values[i].dump()) << ',' << num(s["margin"]) << ','
       << num(s["monotonicity_violated"]) << ',' << format_double(max_inc) << ',' << num(s["dissipation_C_fit"]) << ','
       << num(s["decay_alpha_psi"]) << ',' << num(s["decay_alpha_dpsi"]) << ','
       << (gev.contains("max_ratio") ? num(gev["max_ratio"]) : "nan") << ',' << format_double(finals[i]) << ','
       << format_double(ratio) << '\n';
  }
  fs::create_directories(base.output.dir);
  std::ofstream(fs::path(base.output.dir) / "sweep.csv") << os.str();
  return os.str();
}

}  // namespace orrlab
