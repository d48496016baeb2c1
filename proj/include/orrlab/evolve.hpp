#pragma once

// Time integration of d_t omega_k = -i k f(z) psi_k, psi_k = L_t omega_k,
// one x-mode at a time in Lagrangian coordinates.

#include <cmath>
#include <sstream>
#include <vector>

#include "orrlab/core.hpp"
#include "orrlab/elliptic.hpp"
#include "orrlab/parallel.hpp"
#include "orrlab/profiles.hpp"

namespace orrlab {

class Simulation {
 public:
  /// One operator is factorized per wavenumber and reused for every stage.
  Simulation(ShearProfile profile, ChannelConfig channel, const std::vector<double>& ks,
             const std::vector<std::vector<cplx>>& omega0)
      : profile_(std::move(profile)), channel_(std::move(channel)) {
    channel_.validate();
    if (ks.size() != omega0.size()) throw Error("simulation: one initial field per mode required");
    if (profile_.f_samples().size() != channel_.n_grid)
      throw Error("simulation: profile was sampled on a different grid");
    for (std::size_t m = 0; m < ks.size(); ++m) {
      modes_.push_back(make_field(ks[m], channel_, omega0[m], 0.0));
      initial_.push_back(modes_.back());
    }
    ops_.resize(ks.size());
    parallel_for(ks.size(), [&](std::size_t m) { ops_[m] = EllipticOperator::assemble(profile_, channel_, ks[m]); });
  }

  double time() const { return t_; }
  std::size_t mode_count() const { return modes_.size(); }
  const ModeField& omega(std::size_t m) const { return modes_[m]; }
  const ModeField& omega0(std::size_t m) const { return initial_[m]; }
  const EllipticOperator& op(std::size_t m) const { return ops_[m]; }
  const ShearProfile& profile() const { return profile_; }
  const ChannelConfig& channel() const { return channel_; }

  /// psi_k at the current time.
  ModeField psi(std::size_t m) const { return solve_stream(ops_[m], modes_[m], t_); }

  /// -i k f psi for a single mode with the given vorticity at time t.
  std::vector<cplx> mode_rhs(std::size_t m, const std::vector<cplx>& omega, double t) const {
    const auto psi = ops_[m].solve(omega, t);
    const auto& f = profile_.f_samples();
    const cplx ik(0.0, ops_[m].k());
    std::vector<cplx> out(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) out[i] = -ik * f[i] * psi[i];
    return out;
  }

  /// Right-hand side of every mode at the current state.
  std::vector<std::vector<cplx>> rhs() const {
    std::vector<std::vector<cplx>> out(modes_.size());
    parallel_for(modes_.size(), [&](std::size_t m) { out[m] = mode_rhs(m, modes_[m].values, t_); });
    return out;
  }

  /// Classical four-stage Runge-Kutta step; psi is re-solved at each stage time.
  void step_rk4(double dt) {
    if (!(dt > 0.0)) throw Error("step_rk4: dt must be positive");
    parallel_for(modes_.size(), [&](std::size_t m) { advance_mode(m, dt); });
    t_ += dt;
    for (auto& f : modes_) f.t = t_;
  }

 private:
  void advance_mode(std::size_t m, double dt) {
    auto& w = modes_[m].values;
    const std::size_t n = w.size();
    const auto k1 = mode_rhs(m, w, t_);
    std::vector<cplx> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] + 0.5 * dt * k1[i];
    const auto k2 = mode_rhs(m, tmp, t_ + 0.5 * dt);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] + 0.5 * dt * k2[i];
    const auto k3 = mode_rhs(m, tmp, t_ + 0.5 * dt);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] + dt * k3[i];
    const auto k4 = mode_rhs(m, tmp, t_ + dt);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(w[i].real()) || !std::isfinite(w[i].imag())) {
        std::ostringstream os;
        os << "step_rk4: non-finite vorticity at t=" << t_ + dt << " mode k=" << ops_[m].k()
           << " node " << i << " z=" << modes_[m].grid.z(i);
        throw NumericalError(os.str());
      }
    }
  }

  ShearProfile profile_;
  ChannelConfig channel_;
  double t_ = 0.0;
  std::vector<ModeField> modes_;
  std::vector<ModeField> initial_;
  std::vector<EllipticOperator> ops_;
};

}  // namespace orrlab
