#pragma once

// Truncated Taylor series ("jets") used to evaluate high derivatives of the
// registry shear profiles without finite differences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace orrlab {

/// Taylor coefficients c[n] of a function around a fixed point, truncated
/// after order size() - 1. The n-th derivative is n! * c[n].
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::size_t order, double value = 0.0) : c_(order + 1, 0.0) { c_[0] = value; }

  /// The independent variable x0 + delta.
  static Jet variable(double x0, std::size_t order) {
    Jet j(order, x0);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  std::size_t order() const { return c_.size() - 1; }
  double operator[](std::size_t n) const { return n < c_.size() ? c_[n] : 0.0; }
  double& operator[](std::size_t n) { return c_[n]; }
  double value() const { return c_[0]; }

  double derivative(std::size_t n) const {
    double fact = 1.0;
    for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<double>(i);
    return fact * (*this)[n];
  }

  /// Jet of the derivative function, one order shorter.
  Jet differentiate() const {
    if (order() == 0) return Jet(0, 0.0);
    Jet d(order() - 1);
    for (std::size_t n = 0; n + 1 < c_.size(); ++n) d.c_[n] = static_cast<double>(n + 1) * c_[n + 1];
    return d;
  }

  Jet truncated(std::size_t order) const {
    Jet r(order);
    for (std::size_t n = 0; n <= order; ++n) r.c_[n] = (*this)[n];
    return r;
  }

  Jet& operator+=(const Jet& o) {
    resize_to(o);
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += o[n];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    resize_to(o);
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] -= o[n];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const std::size_t N = std::min(a.order(), b.order());
    Jet r(N);
    for (std::size_t n = 0; n <= N; ++n) {
      double s = 0.0;
      for (std::size_t i = 0; i <= n; ++i) s += a.c_[i] * b.c_[n - i];
      r.c_[n] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    const std::size_t N = std::min(a.order(), b.order());
    Jet r(N);
    const double b0 = b.c_[0];
    for (std::size_t n = 0; n <= N; ++n) {
      double s = a.c_[n];
      for (std::size_t i = 1; i <= n; ++i) s -= b.c_[i] * r.c_[n - i];
      r.c_[n] = s / b0;
    }
    return r;
  }

  friend Jet exp(const Jet& q) {
    // e' = q' e
    const std::size_t N = q.order();
    Jet e(N);
    e.c_[0] = std::exp(q.c_[0]);
    for (std::size_t n = 1; n <= N; ++n) {
      double s = 0.0;
      for (std::size_t i = 1; i <= n; ++i) s += static_cast<double>(i) * q.c_[i] * e.c_[n - i];
      e.c_[n] = s / static_cast<double>(n);
    }
    return e;
  }

  /// sin and cos of a jet, computed together.
  friend std::pair<Jet, Jet> sincos(const Jet& q) {
    const std::size_t N = q.order();
    Jet s(N), c(N);
    s.c_[0] = std::sin(q.c_[0]);
    c.c_[0] = std::cos(q.c_[0]);
    for (std::size_t n = 1; n <= N; ++n) {
      double ss = 0.0, cc = 0.0;
      for (std::size_t i = 1; i <= n; ++i) {
        const double w = static_cast<double>(i) * q.c_[i];
        ss += w * c.c_[n - i];
        cc -= w * s.c_[n - i];
      }
      s.c_[n] = ss / static_cast<double>(n);
      c.c_[n] = cc / static_cast<double>(n);
    }
    return {s, c};
  }

 private:
  void resize_to(const Jet& o) {
    if (o.c_.size() < c_.size()) c_.resize(o.c_.size());
  }

  std::vector<double> c_{0.0};
};

}  // namespace orrlab
