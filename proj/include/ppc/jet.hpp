#pragma once

/**
 * @file jet.hpp
 * @brief Second-order Taylor jets over the chart coordinates (x, y, z).
 *
 * A Jet2 carries the value, gradient and Hessian of a scalar field at one
 * chart point. Arithmetic on jets is the truncated Taylor arithmetic, so
 * composing fields composes their first and second derivatives exactly
 * (up to rounding). The Hessian is stored as its six independent entries,
 * which keeps it symmetric by construction.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>

#include "ppc/errors.hpp"

namespace ppc {

/// Chart coordinates (x, y, z).
struct ChartPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double &operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  friend constexpr bool operator==(const ChartPoint &, const ChartPoint &) = default;
};

inline std::string describe(const ChartPoint &p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << ", " << p.y << ", " << p.z << ")";
  return os.str();
}

enum class Coord : int { x = 0, y = 1, z = 2 };

/// |denominator| below this raises DivisionAtSingularPoint.
inline constexpr double kPoleTolerance = 1e-300;

class Jet2 {
public:
  using Vec = std::array<double, 3>;

  constexpr Jet2() = default;
  constexpr Jet2(double value) : value_(value) {} // NOLINT: constants promote implicitly
  constexpr Jet2(double value, const Vec &grad) : value_(value), grad_(grad) {}
  constexpr Jet2(double value, const Vec &grad, const std::array<double, 6> &hess)
      : value_(value), grad_(grad), hess_(hess) {}

  constexpr double value() const { return value_; }
  constexpr const Vec &grad() const { return grad_; }
  constexpr double grad(std::size_t i) const { return grad_[i]; }
  constexpr double hess(std::size_t i, std::size_t j) const { return hess_[index(i, j)]; }
  constexpr const std::array<double, 6> &hess_packed() const { return hess_; }

  friend constexpr bool operator==(const Jet2 &, const Jet2 &) = default;

  // packed order: xx, xy, xz, yy, yz, zz
  static constexpr std::size_t index(std::size_t i, std::size_t j) {
    if (i > j) {
      const std::size_t t = i;
      i = j;
      j = t;
    }
    return i == 0 ? j : (i == 1 ? 2 + j : 5);
  }

  Jet2 &operator+=(const Jet2 &o) {
    value_ += o.value_;
    for (std::size_t i = 0; i < 3; ++i) grad_[i] += o.grad_[i];
    for (std::size_t i = 0; i < 6; ++i) hess_[i] += o.hess_[i];
    return *this;
  }
  Jet2 &operator-=(const Jet2 &o) {
    value_ -= o.value_;
    for (std::size_t i = 0; i < 3; ++i) grad_[i] -= o.grad_[i];
    for (std::size_t i = 0; i < 6; ++i) hess_[i] -= o.hess_[i];
    return *this;
  }
  Jet2 &operator*=(const Jet2 &o) { return *this = *this * o; }
  Jet2 &operator/=(const Jet2 &o) { return *this = *this / o; }

  friend Jet2 operator+(Jet2 a, const Jet2 &b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2 &b) { return a -= b; }
  friend Jet2 operator-(const Jet2 &a) {
    Jet2 r;
    r.value_ = -a.value_;
    for (std::size_t i = 0; i < 3; ++i) r.grad_[i] = -a.grad_[i];
    for (std::size_t i = 0; i < 6; ++i) r.hess_[i] = -a.hess_[i];
    return r;
  }

  friend Jet2 operator*(const Jet2 &a, const Jet2 &b) {
    Jet2 r;
    r.value_ = a.value_ * b.value_;
    for (std::size_t i = 0; i < 3; ++i) r.grad_[i] = a.value_ * b.grad_[i] + b.value_ * a.grad_[i];
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i; j < 3; ++j) {
        const std::size_t k = index(i, j);
        r.hess_[k] = a.value_ * b.hess_[k] + b.value_ * a.hess_[k] + a.grad_[i] * b.grad_[j] +
                     a.grad_[j] * b.grad_[i];
      }
    }
    return r;
  }

  friend Jet2 operator/(const Jet2 &a, const Jet2 &b) { return a * reciprocal(b); }

  /// Applies a scalar function given its value and first two derivatives at value().
  Jet2 compose(double f, double df, double d2f) const {
    Jet2 r;
    r.value_ = f;
    for (std::size_t i = 0; i < 3; ++i) r.grad_[i] = df * grad_[i];
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i; j < 3; ++j) {
        const std::size_t k = index(i, j);
        r.hess_[k] = d2f * grad_[i] * grad_[j] + df * hess_[k];
      }
    }
    return r;
  }

  friend Jet2 reciprocal(const Jet2 &b) {
    const double v = b.value_;
    if (!(std::abs(v) >= kPoleTolerance))
      throw DivisionAtSingularPoint("division by a field vanishing at the evaluation point");
    const double inv = 1.0 / v;
    return b.compose(inv, -inv * inv, 2.0 * inv * inv * inv);
  }

private:
  double value_ = 0.0;
  Vec grad_{};
  std::array<double, 6> hess_{};
};

/// Coordinate projection seeded at p: exact value, unit gradient, zero Hessian.
inline Jet2 jet_seed(const ChartPoint &p, Coord which) {
  const auto i = static_cast<std::size_t>(which);
  Jet2::Vec g{};
  g[i] = 1.0;
  return Jet2(p[i], g);
}

namespace detail {
inline double ipow(double x, long n) {
  double result = 1.0;
  bool neg = n < 0;
  unsigned long m = neg ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  double base = x;
  while (m) {
    if (m & 1UL) result *= base;
    base *= base;
    m >>= 1;
  }
  return neg ? 1.0 / result : result;
}
} // namespace detail

inline Jet2 pow(const Jet2 &a, long n) {
  if (n == 0) return Jet2(1.0);
  const double v = a.value();
  if (n < 0 && !(std::abs(v) >= kPoleTolerance))
    throw DivisionAtSingularPoint("negative integer power of a field vanishing at the evaluation point");
  const double f = detail::ipow(v, n);
  const double df = static_cast<double>(n) * detail::ipow(v, n - 1);
  const double d2f = n == 1 ? 0.0 : static_cast<double>(n) * static_cast<double>(n - 1) * detail::ipow(v, n - 2);
  return a.compose(f, df, d2f);
}

inline Jet2 exp(const Jet2 &a) {
  const double e = std::exp(a.value());
  return a.compose(e, e, e);
}

inline Jet2 log(const Jet2 &a) {
  const double v = a.value();
  if (!(v > 0.0)) throw DomainError("log of non-positive value " + std::to_string(v));
  return a.compose(std::log(v), 1.0 / v, -1.0 / (v * v));
}

inline Jet2 sqrt(const Jet2 &a) {
  const double v = a.value();
  if (!(v > 0.0)) throw DomainError("sqrt of non-positive value " + std::to_string(v));
  const double s = std::sqrt(v);
  return a.compose(s, 0.5 / s, -0.25 / (s * v));
}

inline Jet2 sin(const Jet2 &a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(s, c, -s);
}

inline Jet2 cos(const Jet2 &a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(c, -s, -c);
}

inline Jet2 sinh(const Jet2 &a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return a.compose(s, c, s);
}

inline Jet2 cosh(const Jet2 &a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return a.compose(c, s, c);
}

enum class UnaryFn { neg, exp, log, sqrt, sin, cos, sinh, cosh };

inline Jet2 jet_unary(const Jet2 &a, UnaryFn fn) {
  switch (fn) {
  case UnaryFn::neg: return -a;
  case UnaryFn::exp: return exp(a);
  case UnaryFn::log: return log(a);
  case UnaryFn::sqrt: return sqrt(a);
  case UnaryFn::sin: return sin(a);
  case UnaryFn::cos: return cos(a);
  case UnaryFn::sinh: return sinh(a);
  case UnaryFn::cosh: return cosh(a);
  }
  return a;
}

enum class BinaryOp { add, sub, mul, div };

inline Jet2 jet_arith(const Jet2 &a, const Jet2 &b, BinaryOp op) {
  switch (op) {
  case BinaryOp::add: return a + b;
  case BinaryOp::sub: return a - b;
  case BinaryOp::mul: return a * b;
  case BinaryOp::div: return a / b;
  }
  return a;
}

} // namespace ppc
