#pragma once

// Stream-function solves psi = L_t omega, i.e.
//   (-k^2 + (g (d_z - i k t))^2) psi = omega,
// in the finite channel (Dirichlet walls at z = 0, 1) and in the periodic
// box standing in for the infinite channel.
//
// Finite channel: psi = exp(i k t z) phi turns the operator into the
// t-independent -k^2 + g d_z (g d_z .), discretized in self-adjoint form with
// midpoint g values and factorized once.
//
// Periodic box: the shifted derivative is diagonal in Fourier space, so the
// operator is applied pseudo-spectrally and inverted by preconditioned CG on
// the Hermitian form k^2/g - D g D, with D = d_z - i k t.

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "orrlab/core.hpp"
#include "orrlab/fft.hpp"
#include "orrlab/profiles.hpp"
#include "orrlab/spectral.hpp"
#include "orrlab/stencil.hpp"

namespace orrlab {

/// LU factors of a real tridiagonal matrix (no pivoting; the stream
/// operator is strictly diagonally dominant for k != 0).
class Tridiagonal {
 public:
  Tridiagonal() = default;
  Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
      : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
    const std::size_t n = diag_.size();
    if (lower_.size() != n || upper_.size() != n) throw Error("tridiagonal: band size mismatch");
    piv_.resize(n);
    factor_upper_.resize(n);
    double d = diag_[0];
    if (d == 0.0) throw Error("tridiagonal: singular factorization");
    piv_[0] = d;
    for (std::size_t i = 1; i < n; ++i) {
      factor_upper_[i - 1] = upper_[i - 1] / piv_[i - 1];
      d = diag_[i] - lower_[i] * factor_upper_[i - 1];
      if (std::abs(d) < 1e-300) throw Error("tridiagonal: singular factorization");
      piv_[i] = d;
    }
  }

  std::size_t size() const { return diag_.size(); }

  /// Solves in place; thread-safe (factors are read-only).
  void solve(std::span<cplx> x) const {
    const std::size_t n = size();
    if (x.size() != n) throw Error("tridiagonal: rhs size mismatch");
    x[0] /= piv_[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - lower_[i] * x[i - 1]) / piv_[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= factor_upper_[i] * x[i + 1];
  }

  std::vector<cplx> apply(std::span<const cplx> x) const {
    const std::size_t n = size();
    std::vector<cplx> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = diag_[i] * x[i];
      if (i > 0) s += lower_[i] * x[i - 1];
      if (i + 1 < n) s += upper_[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& diag() const { return diag_; }
  const std::vector<double>& upper() const { return upper_; }

 private:
  std::vector<double> lower_, diag_, upper_;
  std::vector<double> piv_, factor_upper_;
};

class EllipticOperator {
 public:
  double k() const { return k_; }
  ChannelKind kind() const { return kind_; }
  const Grid& grid() const { return grid_; }
  const std::vector<double>& g_nodes() const { return g_nodes_; }
  /// Finite channel only: the factorized conjugated operator.
  const Tridiagonal& matrix() const { return matrix_; }

  /// Conjugated operator for the finite channel, or the pseudo-spectral
  /// operator for the periodic box.
  static EllipticOperator assemble(const ShearProfile& profile, const ChannelConfig& channel,
                                   double k) {
    return build(k, channel, [&](double z) { return profile.g(z); });
  }

  /// Same operator with g replaced by the constant c.
  static EllipticOperator constant(double c, const ChannelConfig& channel, double k) {
    if (!(c > 0.0)) throw Error("elliptic: constant coefficient must be positive");
    return build(k, channel, [c](double) { return c; });
  }

  /// (-k^2 + (g (d_z - i k t))^2) psi; boundary rows return psi itself in
  /// the finite channel.
  std::vector<cplx> apply(std::span<const cplx> psi, double t) const {
    if (psi.size() != grid_.n) throw Error("elliptic: field size mismatch");
    if (kind_ == ChannelKind::Finite) {
      std::vector<cplx> phi(psi.begin(), psi.end());
      modulate(phi, t, -1.0);
      auto r = matrix_.apply(phi);
      modulate(r, t, 1.0);
      return r;
    }
    const std::size_t M = grid_.periodic_size();
    std::vector<cplx> out(grid_.n);
    std::vector<cplx> in(psi.begin(), psi.begin() + static_cast<std::ptrdiff_t>(M));
    std::vector<cplx> tmp(M);
    apply_hermitian(in, tmp, t);  // k^2/g psi - D g D psi
    for (std::size_t i = 0; i < M; ++i) out[i] = -g_nodes_[i] * tmp[i];
    out[M] = out[0];
    return out;
  }

  /// psi with omega on the right-hand side (zero Dirichlet data in the
  /// finite channel; periodic in the box).
  std::vector<cplx> solve(std::span<const cplx> omega, double t) const {
    if (omega.size() != grid_.n) throw Error("elliptic: mismatched grid");
    if (kind_ == ChannelKind::Finite) {
      std::vector<cplx> phi(omega.begin(), omega.end());
      modulate(phi, t, -1.0);
      phi.front() = 0.0;
      phi.back() = 0.0;
      matrix_.solve(phi);
      modulate(phi, t, 1.0);
      return phi;
    }
    return solve_periodic(omega, t);
  }

  /// Relative residual target of the periodic-box PCG.
  static constexpr double pcg_tolerance = 1e-14;

 private:
  template <class G>
  static EllipticOperator build(double k, const ChannelConfig& channel, G&& g) {
    channel.validate();
    if (k == 0.0) throw Error("elliptic: k must be nonzero");
    EllipticOperator op;
    op.k_ = k;
    op.kind_ = channel.kind;
    op.grid_ = channel.grid();
    const Grid& grid = op.grid_;
    const std::size_t n = grid.n;
    op.g_nodes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      op.g_nodes_[i] = g(grid.z(i));
      if (!(op.g_nodes_[i] > 0.0)) throw Error("elliptic: g must be bounded below by a positive constant");
    }
    op.z_.resize(n);
    for (std::size_t i = 0; i < n; ++i) op.z_[i] = grid.z(i);
    if (channel.kind == ChannelKind::Finite) {
      const double h = grid.h(), h2 = h * h;
      std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0);
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double gm = g(grid.z(i) - 0.5 * h);
        const double gp = g(grid.z(i) + 0.5 * h);
        const double gi = op.g_nodes_[i];
        lo[i] = gi * gm / h2;
        up[i] = gi * gp / h2;
        di[i] = -gi * (gm + gp) / h2 - k * k;
      }
      op.matrix_ = Tridiagonal(std::move(lo), std::move(di), std::move(up));
    } else {
      const std::size_t M = grid.periodic_size();
      op.eta_ = frequencies(grid);
      op.fft_ = fft_for(M);
      double inv_mean = 0.0, mean = 0.0;
      for (std::size_t i = 0; i < M; ++i) {
        inv_mean += 1.0 / op.g_nodes_[i];
        mean += op.g_nodes_[i];
      }
      op.pre_inv_g_ = inv_mean / static_cast<double>(M);
      op.pre_g_ = mean / static_cast<double>(M);
      op.uniform_g_ = std::all_of(op.g_nodes_.begin(), op.g_nodes_.end(),
                                  [&](double x) { return x == op.g_nodes_[0]; });
    }
    return op;
  }

  void modulate(std::vector<cplx>& v, double t, double sign) const {
    if (t == 0.0) return;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, sign * k_ * t * z_[i]);
  }

  // D u for the periodic view: spectral derivative shifted by -i k t.
  void shifted_derivative(std::span<const cplx> u, std::span<cplx> out, double t,
                          std::vector<cplx>& work) const {
    const std::size_t M = u.size();
    fft_->forward(u, work);
    const double inv = 1.0 / static_cast<double>(M);
    for (std::size_t m = 0; m < M; ++m) work[m] *= cplx(0.0, eta_[m] - k_ * t) * inv;
    fft_->backward(work, out);
  }

  // out = k^2/g u - D(g D u)
  void apply_hermitian(std::span<const cplx> u, std::span<cplx> out, double t) const {
    const std::size_t M = u.size();
    std::vector<cplx> work(M), du(M);
    shifted_derivative(u, du, t, work);
    for (std::size_t i = 0; i < M; ++i) du[i] *= g_nodes_[i];
    shifted_derivative(du, out, t, work);
    for (std::size_t i = 0; i < M; ++i) out[i] = k_ * k_ * u[i] / g_nodes_[i] - out[i];
  }

  void precondition(std::span<const cplx> r, std::span<cplx> z, double t,
                    std::vector<cplx>& work) const {
    const std::size_t M = r.size();
    fft_->forward(r, work);
    const double inv = 1.0 / static_cast<double>(M);
    for (std::size_t m = 0; m < M; ++m) {
      const double d = eta_[m] - k_ * t;
      work[m] *= inv / (k_ * k_ * pre_inv_g_ + pre_g_ * d * d);
    }
    fft_->backward(work, z);
  }

  std::vector<cplx> solve_periodic(std::span<const cplx> omega, double t) const {
    const std::size_t M = grid_.periodic_size();
    std::vector<cplx> b(M), x(M, 0.0), r(M), z(M), p(M), Ap(M), work(M);
    double bnorm = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      b[i] = -omega[i] / g_nodes_[i];
      bnorm += std::norm(b[i]);
    }
    bnorm = std::sqrt(bnorm);
    std::vector<cplx> psi(grid_.n, 0.0);
    if (bnorm == 0.0) return psi;
    r = b;
    precondition(r, z, t, work);
    if (uniform_g_) {
      // The preconditioner is the exact inverse when g is constant.
      for (std::size_t i = 0; i < M; ++i) psi[i] = z[i];
      psi[M] = psi[0];
      return psi;
    }
    p = z;
    cplx rz = 0.0;
    for (std::size_t i = 0; i < M; ++i) rz += std::conj(r[i]) * z[i];
    double rnorm = bnorm;
    int it = 0;
    for (; it < 500 && rnorm > pcg_tolerance * bnorm; ++it) {
      apply_hermitian(p, Ap, t);
      cplx pAp = 0.0;
      for (std::size_t i = 0; i < M; ++i) pAp += std::conj(p[i]) * Ap[i];
      const cplx alpha = rz / pAp;
      rnorm = 0.0;
      for (std::size_t i = 0; i < M; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
        rnorm += std::norm(r[i]);
      }
      rnorm = std::sqrt(rnorm);
      if (rnorm <= pcg_tolerance * bnorm) break;
      precondition(r, z, t, work);
      cplx rz_new = 0.0;
      for (std::size_t i = 0; i < M; ++i) rz_new += std::conj(r[i]) * z[i];
      const cplx beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < M; ++i) p[i] = z[i] + beta * p[i];
    }
    if (!(rnorm <= 1e-10 * bnorm)) throw Error("elliptic: preconditioned CG did not converge");
    for (std::size_t i = 0; i < M; ++i) psi[i] = x[i];
    psi[M] = psi[0];
    return psi;
  }

  double k_ = 1.0;
  ChannelKind kind_ = ChannelKind::Finite;
  Grid grid_;
  std::vector<double> g_nodes_;
  std::vector<double> z_;
  Tridiagonal matrix_;
  std::vector<double> eta_;
  std::shared_ptr<const Fft> fft_;
  double pre_inv_g_ = 1.0, pre_g_ = 1.0;
  bool uniform_g_ = false;
};

inline EllipticOperator assemble_conjugated_operator(const ShearProfile& profile,
                                                     const ChannelConfig& channel, double k) {
  return EllipticOperator::assemble(profile, channel, k);
}

inline void check_compatible(const EllipticOperator& op, const ModeField& f) {
  if (!(f.grid == op.grid()) || f.kind != op.kind()) throw Error("elliptic: mismatched grid");
  if (f.k != op.k()) throw Error("elliptic: field wavenumber does not match operator");
}

/// psi = L_t omega
inline ModeField solve_stream(const EllipticOperator& op, const ModeField& omega, double t) {
  check_compatible(op, omega);
  return ModeField{omega.k, omega.grid, omega.kind, op.solve(omega.values, t), t};
}

/// Lambda_t[u]: the Dirichlet solve with g replaced by the constant C_low.
inline ModeField lambda_solve(const ModeField& u, double t, const WeightParams& w,
                              const ChannelConfig& channel) {
  if (channel.kind != ChannelKind::Finite) throw Error("lambda_solve: finite channel only");
  const auto op = EllipticOperator::constant(w.C_low, channel, u.k);
  return solve_stream(op, u, t);
}

struct DualNorm {
  double value = 0.0;          // sqrt(-Re <Lambda_t u, u>)
  double via_h1t = 0.0;        // ||Lambda_t u||_{H^1_t} in the discrete energy
  double raw_inner = 0.0;      // -Re <Lambda_t u, u>
  bool discretization_failure = false;
};

/// Finite-channel H^{-1}_t norm defined through Lambda_t, evaluated two ways.
inline DualNorm hm1t_dual_norm(const ModeField& u, double t, const WeightParams& w,
                               const ChannelConfig& channel) {
  const ModeField lam = lambda_solve(u, t, w, channel);
  const Grid& grid = u.grid;
  const double h = grid.h();
  DualNorm out;
  out.raw_inner = -inner(grid, lam.values, u.values).real();
  const double scale = std::max(1e-300, l2_norm(grid, u.values) * l2_norm(grid, lam.values));
  out.discretization_failure = out.raw_inner < -1e-12 * scale;
  out.value = std::sqrt(std::max(0.0, out.raw_inner));
  // k^2 ||Lambda||^2 + c^2 ||(d - ikt) Lambda||^2 with the discrete gradient
  // of the conjugated variable on cells.
  double mass = 0.0, grad = 0.0;
  std::vector<cplx> phi(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) phi[i] = lam.values[i] * std::polar(1.0, -u.k * t * grid.z(i));
  for (std::size_t i = 1; i + 1 < grid.n; ++i) mass += std::norm(phi[i]);
  for (std::size_t i = 0; i + 1 < grid.n; ++i) grad += std::norm((phi[i + 1] - phi[i]) / h);
  out.via_h1t = std::sqrt(u.k * u.k * h * mass + w.C_low * w.C_low * h * grad);
  return out;
}

namespace detail {
// sinh(a)/sinh(b) without overflow.
inline double sinh_ratio(double a, double b) {
  if (b == 0.0 || std::abs(std::sinh(b)) < 1e-300) throw Error("homogeneous_solutions: degenerate sinh denominator");
  if (std::abs(b) < 300.0) return std::sinh(a) / std::sinh(b);
  const double sa = a < 0.0 ? -1.0 : 1.0, sb = b < 0.0 ? -1.0 : 1.0;
  const double A = std::abs(a), B = std::abs(b);
  return sa * sb * std::exp(A - B) * (-std::expm1(-2.0 * A)) / (-std::expm1(-2.0 * B));
}
}  // namespace detail

/// Adjoint homogeneous solutions u_0, u_1 at time t, normalized so that
/// u_0 = -1 at z = 0, u_0 = 0 at z = 1, u_1 = 0 at z = 0 and u_1 = 1 at z = 1.
inline std::pair<ModeField, ModeField> homogeneous_solutions(const ShearProfile& profile,
                                                             const ChannelConfig& channel, double k,
                                                             double t) {
  if (channel.kind != ChannelKind::Finite) throw Error("homogeneous_solutions: finite channel only");
  const Grid grid = channel.grid();
  const double Y0 = profile.inverse(0.0), Y1 = profile.inverse(1.0);
  const double g0 = profile.g(0.0), g1 = profile.g(1.0);
  ModeField u0{k, grid, channel.kind, std::vector<cplx>(grid.n), t};
  ModeField u1{k, grid, channel.kind, std::vector<cplx>(grid.n), t};
  const double denom = k * (Y0 - Y1);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double z = grid.z(i);
    const double y = profile.inverse(z);
    const double g = profile.g(z);
    const double a0 = -(g0 / g) * detail::sinh_ratio(k * (y - Y1), denom);
    const double a1 = -(g1 / g) * detail::sinh_ratio(k * (y - Y0), denom);
    u0.values[i] = a0 * std::polar(1.0, k * t * z);
    u1.values[i] = a1 * std::polar(1.0, k * t * (z - 1.0));
  }
  return {u0, u1};
}

/// Max interior residual of (-k^2 + ((d_z - i k t) g)^2) u, relative to
/// max |k^2 u|, using fourth-order centered differences.
inline double adjoint_residual(const ShearProfile& profile, const ModeField& u, double t) {
  const Grid& grid = u.grid;
  const double k = u.k, h = grid.h();
  std::vector<cplx> v(grid.n), gv(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    v[i] = u.values[i] * std::polar(1.0, -k * t * grid.z(i));
    gv[i] = profile.g(grid.z(i)) * v[i];
  }
  auto d1 = grid_derivative(gv, h, 1, 5);
  for (std::size_t i = 0; i < grid.n; ++i) d1[i] *= profile.g(grid.z(i));
  auto d2 = grid_derivative(d1, h, 1, 5);
  double res = 0.0, scale = 0.0;
  for (std::size_t i = 4; i + 4 < grid.n; ++i) {
    res = std::max(res, std::abs(d2[i] - k * k * v[i]));
    scale = std::max(scale, std::abs(k * k * v[i]));
  }
  return scale > 0.0 ? res / scale : res;
}

enum class NeumannMethod { FiniteDifference, IntegralFormula };

struct BoundaryData {
  cplx neumann_0 = 0.0;  // d_z psi at z = 0
  cplx neumann_1 = 0.0;  // d_z psi at z = 1
  double t = 0.0;
  NeumannMethod method = NeumannMethod::IntegralFormula;
};

/// Wall derivative of order j from a one-sided fourth-order stencil.
inline cplx wall_derivative(const ModeField& psi, std::size_t order, bool at_zero) {
  return one_sided_derivative<cplx>(psi.values, psi.grid.h(), order, 4, at_zero);
}

inline BoundaryData neumann_data_fd(const ModeField& psi) {
  if (psi.grid.n < 6) throw Error("neumann_data_fd: grid too coarse (need at least 6 points)");
  return BoundaryData{wall_derivative(psi, 1, true), wall_derivative(psi, 1, false), psi.t,
                      NeumannMethod::FiniteDifference};
}

/// Neumann data from integrals of omega against the homogeneous solutions.
inline BoundaryData neumann_data_integral(const ModeField& omega, const ModeField& u0,
                                          const ModeField& u1, const ShearProfile& profile) {
  const double g0 = profile.g(0.0), g1 = profile.g(1.0);
  return BoundaryData{inner(omega.grid, u0.values, omega.values) / (g0 * g0),
                      inner(omega.grid, u1.values, omega.values) / (g1 * g1), omega.t,
                      NeumannMethod::IntegralFormula};
}

}  // namespace orrlab
