#pragma once

// Run configuration: strict JSON parsing, validation that lists every
// violation, and materialization of all defaults.

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "orrlab/core.hpp"
#include "orrlab/profiles.hpp"
#include "orrlab/spectral.hpp"

namespace orrlab {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct InitialSpec {
  std::string name = "gaussian";  // gaussian | plane | constant | sin | bump | poly | random
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  double frequency = 0.0;  // plane/gaussian carrier, sin mode number
  int power = 2;           // poly: z^p (1-z)^p
  int count = 8;           // random: number of sine modes
};

struct TimeSpec {
  double dt = 0.01;
  double t_end = 10.0;
  double snapshot_every = 0.1;
};

struct LadderSpec {
  std::size_t J = 4;
  double constant = 1.0;
  double tol_mono = 1e-8;
  std::vector<double> extra_constants{0.5, 2.0};
};

struct DiagnosticsSpec {
  bool neumann = true;          // finite channel only
  bool support_drift = true;    // needs channel.support_interval
  bool boundary_probe = true;   // grid H^2 proxy, finite channel only
  bool fatal_on_violation = false;
  double smallness_threshold = 0.1;
};

struct FitSpec {
  double window_a = 10.0;
  double window_b = 100.0;
  double gevrey_s = 1.0;
};

struct OutputSpec {
  std::string dir = "orrlab_out";
  std::size_t field_dump_stride = 0;  // snapshots between field dumps; 0 = first and last only
};

struct RunConfig {
  std::string profile_name = "couette";
  ProfileParams profile;
  ChannelConfig channel;
  std::vector<int> modes{1};
  InitialSpec initial;
  TimeSpec time;
  WeightParams weights;
  bool C_low_auto = true;  // resolved to the bilipschitz lower bound of U'
  LadderSpec ladder;
  DiagnosticsSpec diagnostics;
  FitSpec fits;
  OutputSpec output;
  std::uint64_t seed = 12345;

  std::size_t steps() const { return static_cast<std::size_t>(std::llround(time.t_end / time.dt)); }
  std::size_t snapshot_stride() const {
    return static_cast<std::size_t>(std::llround(time.snapshot_every / time.dt));
  }
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      errors_.push_back(where + ": expected an object");
      return;
    }
    for (const auto& [key, _] : obj.items())
      if (!allowed.count(key)) errors_.push_back(where + ": unknown key '" + key + "'");
  }

  template <class T>
  void get(const json& obj, const std::string& where, const std::string& key, T& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::runtime_error("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::runtime_error("");
        if constexpr (std::is_unsigned_v<T>)
          if (v.get<long long>() < 0) throw std::runtime_error("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::runtime_error("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::runtime_error("");
      }
      out = v.get<T>();
    } catch (...) {
      errors_.push_back(where + "." + key + ": wrong type");
    }
  }

  void fail(const std::string& msg) { errors_.push_back(msg); }

 private:
  std::vector<std::string>& errors_;
};

inline std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

}  // namespace detail

inline std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> e;
  try {
    profile_family(c.profile_name);
  } catch (const Error&) {
    e.push_back("profile.name: unknown profile '" + c.profile_name + "'");
  }
  if (c.profile_name == "couette_bump" && !(c.profile.width > 0.0)) e.push_back("profile.width: must be positive");
  const auto& ch = c.channel;
  if (!(ch.L > 0.0)) e.push_back("channel.L: must be positive");
  if (ch.n_grid < 9) e.push_back("channel.n_grid: must be at least 9");
  if (ch.kind == ChannelKind::Finite && (ch.z_min != 0.0 || ch.z_max != 1.0))
    e.push_back("channel: finite channel spans z in [0,1]");
  if (!(ch.z_max > ch.z_min)) e.push_back("channel: z_max must exceed z_min");
  if (ch.support_interval) {
    const auto [a, b] = *ch.support_interval;
    if (!(a < b && a >= ch.z_min && b <= ch.z_max)) e.push_back("channel.support_interval: must be an ordered sub-interval");
  }
  if (ch.vanish_order && *ch.vanish_order < 0) e.push_back("channel.vanish_order: must be nonnegative");
  if (c.modes.empty()) e.push_back("modes: at least one mode required");
  for (int m : c.modes)
    if (m == 0) e.push_back("modes: mode 0 has no Orr dynamics");
  static const std::set<std::string> initials{"gaussian", "plane", "constant", "sin", "bump", "poly", "random"};
  if (!initials.count(c.initial.name)) e.push_back("initial.name: unknown initial datum '" + c.initial.name + "'");
  if (!(c.initial.width > 0.0)) e.push_back("initial.width: must be positive");
  if (c.initial.power < 0) e.push_back("initial.power: must be nonnegative");
  if (c.initial.count < 1) e.push_back("initial.count: must be positive");
  const auto& t = c.time;
  if (!(t.dt > 0.0)) e.push_back("time.dt: must be positive");
  if (!(t.t_end > 0.0)) e.push_back("time.t_end: must be positive");
  if (!(t.snapshot_every > 0.0)) e.push_back("time.snapshot_every: must be positive");
  if (t.dt > 0.0 && t.t_end > 0.0 && std::abs(c.steps() * t.dt - t.t_end) > 1e-9 * t.t_end)
    e.push_back("time.t_end: must be a multiple of dt");
  if (t.dt > 0.0 && t.snapshot_every > 0.0 &&
      (c.snapshot_stride() == 0 || std::abs(c.snapshot_stride() * t.dt - t.snapshot_every) > 1e-9 * t.snapshot_every))
    e.push_back("time.snapshot_every: must be a positive multiple of dt");
  try {
    WeightParams w = c.weights;
    if (c.C_low_auto) w.C_low = 1.0;
    w.validate();
  } catch (const Error& err) {
    e.push_back(err.what());
  }
  if (c.ladder.J > 8) e.push_back("ladder.J: at most 8");
  if (!(c.ladder.constant > 0.0)) e.push_back("ladder.constant: must be positive");
  for (double x : c.ladder.extra_constants)
    if (!(x > 0.0)) e.push_back("ladder.extra_constants: entries must be positive");
  if (!(c.ladder.tol_mono >= 0.0)) e.push_back("ladder.tol_mono: must be nonnegative");
  if (!(c.fits.window_b > c.fits.window_a && c.fits.window_a > 0.0))
    e.push_back("fits.decay_window: need 0 < a < b");
  if (!(c.fits.gevrey_s >= 1.0)) e.push_back("fits.gevrey_s: must be >= 1");
  if (c.output.dir.empty()) e.push_back("output.dir: must be nonempty");
  return e;
}

inline RunConfig parse_config(const json& j) {
  std::vector<std::string> errors;
  detail::Reader r(errors);
  RunConfig c;
  r.keys(j, "config", {"schema_version", "profile", "channel", "modes", "initial", "time", "weights", "ladder",
                       "diagnostics", "fits", "output", "seed"});
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  if (!j.contains("schema_version")) errors.push_back("schema_version: missing");
  else if (j.at("schema_version") != schema_version)
    errors.push_back("schema_version: expected " + std::to_string(schema_version));

  const json empty = json::object();
  auto section = [&](const char* name) -> const json& { return j.contains(name) ? j.at(name) : empty; };

  const json& p = section("profile");
  r.keys(p, "profile", {"name", "epsilon", "center", "width", "phase"});
  r.get(p, "profile", "name", c.profile_name);
  r.get(p, "profile", "epsilon", c.profile.epsilon);
  r.get(p, "profile", "center", c.profile.center);
  r.get(p, "profile", "width", c.profile.width);
  r.get(p, "profile", "phase", c.profile.phase);

  const json& ch = section("channel");
  r.keys(ch, "channel", {"kind", "L", "z_min", "z_max", "n_grid", "support_interval", "vanish_order"});
  std::string kind = "finite";
  r.get(ch, "channel", "kind", kind);
  if (kind == "finite") c.channel.kind = ChannelKind::Finite;
  else if (kind == "infinite") c.channel.kind = ChannelKind::Infinite;
  else errors.push_back("channel.kind: expected 'finite' or 'infinite'");
  if (c.channel.kind == ChannelKind::Infinite) {
    c.channel.z_min = -10.0;
    c.channel.z_max = 10.0;
  }
  r.get(ch, "channel", "L", c.channel.L);
  r.get(ch, "channel", "z_min", c.channel.z_min);
  r.get(ch, "channel", "z_max", c.channel.z_max);
  r.get(ch, "channel", "n_grid", c.channel.n_grid);
  if (ch.is_object() && ch.contains("support_interval") && !ch.at("support_interval").is_null()) {
    const json& s = ch.at("support_interval");
    if (s.is_array() && s.size() == 2 && s[0].is_number() && s[1].is_number())
      c.channel.support_interval = std::pair{s[0].get<double>(), s[1].get<double>()};
    else errors.push_back("channel.support_interval: expected [a, b] or null");
  }
  if (ch.is_object() && ch.contains("vanish_order") && !ch.at("vanish_order").is_null()) {
    int v = 0;
    r.get(ch, "channel", "vanish_order", v);
    c.channel.vanish_order = v;
  }

  if (j.contains("modes")) {
    const json& m = j.at("modes");
    if (!m.is_array()) errors.push_back("modes: expected an array of integers");
    else {
      c.modes.clear();
      for (const auto& x : m) {
        if (x.is_number_integer()) c.modes.push_back(x.get<int>());
        else errors.push_back("modes: entries must be integers");
      }
    }
  }

  const json& in = section("initial");
  r.keys(in, "initial", {"name", "amplitude", "center", "width", "frequency", "power", "count"});
  r.get(in, "initial", "name", c.initial.name);
  r.get(in, "initial", "amplitude", c.initial.amplitude);
  r.get(in, "initial", "center", c.initial.center);
  r.get(in, "initial", "width", c.initial.width);
  r.get(in, "initial", "frequency", c.initial.frequency);
  r.get(in, "initial", "power", c.initial.power);
  r.get(in, "initial", "count", c.initial.count);

  const json& t = section("time");
  r.keys(t, "time", {"dt", "t_end", "snapshot_every"});
  r.get(t, "time", "dt", c.time.dt);
  r.get(t, "time", "t_end", c.time.t_end);
  r.get(t, "time", "snapshot_every", c.time.snapshot_every);

  const json& w = section("weights");
  r.keys(w, "weights", {"c_exp", "C_low", "beta", "gamma", "delta"});
  r.get(w, "weights", "c_exp", c.weights.c_exp);
  if (w.is_object() && w.contains("C_low") && !w.at("C_low").is_null()) {
    r.get(w, "weights", "C_low", c.weights.C_low);
    c.C_low_auto = false;
  }
  r.get(w, "weights", "beta", c.weights.beta);
  r.get(w, "weights", "gamma", c.weights.gamma);
  r.get(w, "weights", "delta", c.weights.delta);

  const json& l = section("ladder");
  r.keys(l, "ladder", {"J", "constant", "tol_mono", "extra_constants"});
  r.get(l, "ladder", "J", c.ladder.J);
  r.get(l, "ladder", "constant", c.ladder.constant);
  r.get(l, "ladder", "tol_mono", c.ladder.tol_mono);
  if (l.is_object() && l.contains("extra_constants")) {
    const json& x = l.at("extra_constants");
    c.ladder.extra_constants.clear();
    if (!x.is_array()) errors.push_back("ladder.extra_constants: expected an array");
    else
      for (const auto& v : x) {
        if (v.is_number()) c.ladder.extra_constants.push_back(v.get<double>());
        else errors.push_back("ladder.extra_constants: entries must be numbers");
      }
  }

  const json& d = section("diagnostics");
  r.keys(d, "diagnostics", {"neumann", "support_drift", "boundary_probe", "fatal_on_violation", "smallness_threshold"});
  r.get(d, "diagnostics", "neumann", c.diagnostics.neumann);
  r.get(d, "diagnostics", "support_drift", c.diagnostics.support_drift);
  r.get(d, "diagnostics", "boundary_probe", c.diagnostics.boundary_probe);
  r.get(d, "diagnostics", "fatal_on_violation", c.diagnostics.fatal_on_violation);
  r.get(d, "diagnostics", "smallness_threshold", c.diagnostics.smallness_threshold);

  const json& f = section("fits");
  r.keys(f, "fits", {"decay_window", "gevrey_s"});
  if (f.is_object() && f.contains("decay_window")) {
    const json& x = f.at("decay_window");
    if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number()) {
      c.fits.window_a = x[0].get<double>();
      c.fits.window_b = x[1].get<double>();
    } else errors.push_back("fits.decay_window: expected [a, b]");
  }
  r.get(f, "fits", "gevrey_s", c.fits.gevrey_s);

  const json& o = section("output");
  r.keys(o, "output", {"dir", "field_dump_stride"});
  r.get(o, "output", "dir", c.output.dir);
  r.get(o, "output", "field_dump_stride", c.output.field_dump_stride);

  if (j.contains("seed")) {
    const json& sd = j.at("seed");
    if (sd.is_number_unsigned() || (sd.is_number_integer() && sd.get<std::int64_t>() >= 0))
      c.seed = sd.get<std::uint64_t>();
    else errors.push_back("seed: expected a nonnegative integer");
  }

  if (errors.empty()) {
    auto more = validate_config(c);
    errors.insert(errors.end(), more.begin(), more.end());
  }
  if (!errors.empty()) throw ConfigError("invalid config: " + detail::join(errors, "; "));
  return c;
}

/// Every field written out, so a stored copy reproduces the run on its own.
inline json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = schema_version;
  j["profile"] = {{"name", c.profile_name},
                  {"epsilon", c.profile.epsilon},
                  {"center", c.profile.center},
                  {"width", c.profile.width},
                  {"phase", c.profile.phase}};
  json ch = {{"kind", to_string(c.channel.kind)},
             {"L", c.channel.L},
             {"z_min", c.channel.z_min},
             {"z_max", c.channel.z_max},
             {"n_grid", c.channel.n_grid}};
  ch["support_interval"] = c.channel.support_interval
                               ? json::array({c.channel.support_interval->first, c.channel.support_interval->second})
                               : json(nullptr);
  ch["vanish_order"] = c.channel.vanish_order ? json(*c.channel.vanish_order) : json(nullptr);
  j["channel"] = ch;
  j["modes"] = c.modes;
  j["initial"] = {{"name", c.initial.name},
                  {"amplitude", c.initial.amplitude},
                  {"center", c.initial.center},
                  {"width", c.initial.width},
                  {"frequency", c.initial.frequency},
                  {"power", c.initial.power},
                  {"count", c.initial.count}};
  j["time"] = {{"dt", c.time.dt}, {"t_end", c.time.t_end}, {"snapshot_every", c.time.snapshot_every}};
  j["weights"] = {{"c_exp", c.weights.c_exp},
                  {"C_low", c.C_low_auto ? json(nullptr) : json(c.weights.C_low)},
                  {"beta", c.weights.beta},
                  {"gamma", c.weights.gamma},
                  {"delta", c.weights.delta}};
  j["ladder"] = {{"J", c.ladder.J},
                 {"constant", c.ladder.constant},
                 {"tol_mono", c.ladder.tol_mono},
                 {"extra_constants", c.ladder.extra_constants}};
  j["diagnostics"] = {{"neumann", c.diagnostics.neumann},
                      {"support_drift", c.diagnostics.support_drift},
                      {"boundary_probe", c.diagnostics.boundary_probe},
                      {"fatal_on_violation", c.diagnostics.fatal_on_violation},
                      {"smallness_threshold", c.diagnostics.smallness_threshold}};
  j["fits"] = {{"decay_window", {c.fits.window_a, c.fits.window_b}}, {"gevrey_s", c.fits.gevrey_s}};
  j["output"] = {{"dir", c.output.dir}, {"field_dump_stride", c.output.field_dump_stride}};
  j["seed"] = c.seed;
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

}  // namespace orrlab
