// orrlab command-line front end: run, sweep, verify, fit.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "orrlab/orrlab.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

int cmd_run(const std::string& path) {
  const orrlab::RunConfig cfg = orrlab::load_config(path);
  const auto r = orrlab::execute(cfg, true);
  std::cout << "status " << r.summary.at("status").get<std::string>() << "\n"
            << "output " << cfg.output.dir << "\n";
  if (r.fatal) return 3;
  if (r.violation && cfg.diagnostics.fatal_on_violation) return 3;
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& values) {
  const orrlab::RunConfig cfg = orrlab::load_config(path);
  std::vector<orrlab::json> parsed;
  for (const auto& v : split_list(values)) parsed.push_back(orrlab::parse_sweep_value(v));
  std::cout << orrlab::sweep(cfg, param, parsed);
  return 0;
}

int cmd_verify(bool full) {
  int failed = 0;
  auto report = [&](const orrlab::CheckResult& r) {
    std::cout << orrlab::format_check(r) << std::endl;
    if (!r.pass) ++failed;
  };
  for (const auto& r : orrlab::quick_checks()) report(r);
  if (full) {
    orrlab::AcceptanceSuite suite;
    for (const auto& r : suite.run_all()) report(r);
  }
  std::cout << failed << " check(s) failed\n";
  return failed == 0 ? 0 : 1;
}

int cmd_fit(const std::string& dir, const std::string& window, double s) {
  std::optional<std::pair<double, double>> w;
  if (!window.empty()) {
    const auto parts = split_list(window);
    if (parts.size() != 2) throw orrlab::Error("fit: --window expects a,b");
    w = std::pair{orrlab::parse_double(parts[0]), orrlab::parse_double(parts[1])};
  }
  std::optional<double> gs;
  if (s > 0.0) gs = s;
  const auto summary = orrlab::refit(dir, w, gs);
  const auto& psi = summary.at("per_mode").at(0).at("decay_psi");
  if (psi.contains("error")) throw orrlab::Error(psi.at("error").get<std::string>());
  std::cout << "decay_alpha_psi " << summary.at("decay_alpha_psi").dump() << "\n"
            << "decay_alpha_dpsi " << summary.at("decay_alpha_dpsi").dump() << "\n"
            << "gevrey max_ratio " << summary.at("gevrey_C_of_t").value("max_ratio", orrlab::json(nullptr)).dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orrlab: linearized Euler around shear flows in Lagrangian coordinates"};
  app.require_subcommand(1);

  std::string cfg_path, param, values, dir, window;
  bool full = false;
  double s = 0.0;

  auto* run = app.add_subcommand("run", "Run one configuration");
  run->add_option("config", cfg_path, "Config JSON")->required();

  auto* sweep = app.add_subcommand("sweep", "Run one cell per parameter value");
  sweep->add_option("config", cfg_path, "Config JSON")->required();
  sweep->add_option("--param", param, "Dotted config key, e.g. profile.epsilon")->required();
  sweep->add_option("--values", values, "Comma-separated values (may be empty)")->required();

  auto* verify = app.add_subcommand("verify", "Invariant checks; --full adds the acceptance runs");
  verify->add_flag("--full", full);

  auto* fit = app.add_subcommand("fit", "Recompute fits of a stored run");
  fit->add_option("dir", dir, "Run output directory")->required();
  fit->add_option("--window", window, "Decay fit window a,b");
  fit->add_option("--s", s, "Gevrey index");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(cfg_path);
    if (*sweep) return cmd_sweep(cfg_path, param, values);
    if (*verify) return cmd_verify(full);
    if (*fit) return cmd_fit(dir, window, s);
  } catch (const orrlab::ConfigError& e) {
    std::cerr << "orrlab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "orrlab: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
