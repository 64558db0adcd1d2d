#pragma once

// Helpers shared by the test suites: a seeded random expression generator
// and a central finite-difference oracle.

#include <array>
#include <cmath>
#include <random>
#include <string>

#include "ppc/expr.hpp"
#include "ppc/jet.hpp"

namespace ppc::support {

/// Random well-scaled expression over x, y, z and the constant k.
/// Divisions and logs are guarded so values stay away from poles on [-1,1]^3.
class ExprGenerator {
public:
  explicit ExprGenerator(unsigned seed) : rng_(seed) {}

  std::string make(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(9)) {
    case 0: return "(" + make(depth - 1) + " + " + make(depth - 1) + ")";
    case 1: return "(" + make(depth - 1) + " - " + make(depth - 1) + ")";
    case 2: return "(" + make(depth - 1) + ")*(" + make(depth - 1) + ")";
    case 3: return "(" + make(depth - 1) + ")/(2 + (" + make(depth - 1) + ")^2)";
    case 4: return "sin(" + make(depth - 1) + ")";
    case 5: return "cos(" + make(depth - 1) + ")";
    case 6: return "exp(0.5*sin(" + make(depth - 1) + "))";
    case 7: return "log(1.5 + cos(" + make(depth - 1) + "))";
    default: return "sqrt(1 + (" + make(depth - 1) + ")^2)";
    }
  }

private:
  std::string leaf() {
    static const char *names[] = {"x", "y", "z", "k", "x*y", "z^2", "-y", "0.75"};
    return names[pick(8)];
  }
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::mt19937 rng_;
};

inline double eval_value(const Expr &e, const ChartPoint &p, const Bindings &env) { return eval_jet(e, p, env).value(); }

struct FiniteDifference {
  std::array<double, 3> grad;
  std::array<std::array<double, 3>, 3> hess;
};

inline FiniteDifference central_difference(const Expr &e, const ChartPoint &p, const Bindings &env, double h) {
  FiniteDifference fd{};
  auto shifted = [&](int i, double di, int j, double dj) {
    ChartPoint q = p;
    q[static_cast<std::size_t>(i)] += di;
    q[static_cast<std::size_t>(j)] += dj;
    return eval_value(e, q, env);
  };
  const double f0 = eval_value(e, p, env);
  for (int i = 0; i < 3; ++i) {
    fd.grad[i] = (shifted(i, h, i, 0) - shifted(i, -h, i, 0)) / (2 * h);
    fd.hess[i][i] = (shifted(i, h, i, 0) - 2 * f0 + shifted(i, -h, i, 0)) / (h * h);
    for (int j = i + 1; j < 3; ++j) {
      fd.hess[i][j] = (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) + shifted(i, -h, j, -h)) /
                      (4 * h * h);
      fd.hess[j][i] = fd.hess[i][j];
    }
  }
  return fd;
}

/// |a - b| scaled by max(1, |b|).
inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace ppc::support
