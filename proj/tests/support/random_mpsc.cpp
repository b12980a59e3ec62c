#include "support/random_mpsc.hpp"

#include <functional>

namespace mpsc::testing {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vector random_point(Rng& rng, int n, double lo, double hi) {
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = uniform(rng, lo, hi);
  return x;
}

std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

Expr random_polynomial(Rng& rng, int n, int degree, double density, double scale) {
  Expr sum = Expr::constant(uniform(rng, -scale, scale));
  std::vector<int> powers(n, 0);
  std::function<void(int, int)> visit = [&](int var, int left) {
    if (var == n) {
      if (left == degree) return;  // constant term already present
      if (uniform(rng, 0.0, 1.0) > density) return;
      Expr term = Expr::constant(uniform(rng, -scale, scale));
      for (int i = 0; i < n; ++i) {
        if (powers[i] == 1) term = term * Expr::variable(i);
        if (powers[i] > 1) term = term * pow(Expr::variable(i), powers[i]);
      }
      sum = sum + term;
      return;
    }
    for (int d = 0; d <= left; ++d) {
      powers[var] = d;
      visit(var + 1, left - d);
    }
    powers[var] = 0;
  };
  visit(0, degree);
  return sum;
}

Expr random_smooth_expr(Rng& rng, int n, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  if (depth == 0) {
    if (uniform(rng, 0.0, 1.0) < 0.75) return Expr::variable(std::uniform_int_distribution<int>(0, n - 1)(rng));
    return Expr::constant(uniform(rng, -2.0, 2.0));
  }
  const Expr a = random_smooth_expr(rng, n, depth - 1);
  const Expr two = Expr::constant(2.0);
  switch (pick(rng)) {
    case 0:
      return a + random_smooth_expr(rng, n, depth - 1);
    case 1:
      return a - random_smooth_expr(rng, n, depth - 1);
    case 2:
    case 3:
      return a * random_smooth_expr(rng, n, depth - 1);
    case 4:
      return a / (two + pow(random_smooth_expr(rng, n, depth - 1), 2));
    case 5:
      return pow(a, std::uniform_int_distribution<int>(2, 3)(rng));
    case 6:
      return sin(a);
    case 7:
      return cos(a);
    case 8:
      return exp(Expr::constant(0.5) * sin(a));
    default:
      return log(Expr::constant(1.0) + pow(a, 2));
  }
}

namespace {

Expr random_affine(Rng& rng, int n) { return random_polynomial(rng, n, 1, 1.0, 1.0); }

Expr random_switch_function(Rng& rng, int n) {
  if (uniform(rng, 0.0, 1.0) < 0.6) return random_affine(rng, n);
  return random_polynomial(rng, n, 2, 0.5, 1.0);
}

}  // namespace

Problem random_mpsc(Rng& rng, const RandomMpscShape& shape) {
  const int n = std::uniform_int_distribution<int>(1, shape.max_n)(rng);
  const int k = std::uniform_int_distribution<int>(0, shape.max_k)(rng);
  const int j = std::uniform_int_distribution<int>(0, shape.max_j)(rng);
  Expr f = random_polynomial(rng, n, 2, 0.8, 1.0);
  if (shape.degree >= 3) f = f + random_polynomial(rng, n, 3, 0.3, 0.3);
  // Keep the objective bounded below on the box so stationary points stay inside.
  for (int i = 0; i < n; ++i) f = f + Expr::constant(0.5) * pow(Expr::variable(i), 2);
  std::vector<Expr> ineq;
  for (int q = 0; q < j; ++q) {
    Expr g = random_affine(rng, n) + Expr::constant(uniform(rng, 0.0, 1.0));
    if (uniform(rng, 0.0, 1.0) < 0.3) g = g - Expr::constant(0.5) * pow(Expr::variable(q % n), 2);
    ineq.push_back(g);
  }
  std::vector<SwitchPair> sw;
  for (int m = 0; m < k; ++m) sw.push_back({random_switch_function(rng, n), random_switch_function(rng, n)});
  return Problem(default_names(n), f, {}, ineq, sw);
}

Problem random_planar_mpsc(Rng& rng, bool with_inequality) {
  Expr f = random_polynomial(rng, 2, 2, 1.0, 1.0) + random_polynomial(rng, 2, 3, 0.4, 0.2);
  for (int i = 0; i < 2; ++i) f = f + Expr::constant(0.5) * pow(Expr::variable(i), 2);
  std::vector<Expr> ineq;
  if (with_inequality) ineq.push_back(random_affine(rng, 2) + Expr::constant(uniform(rng, 0.0, 0.5)));
  std::vector<SwitchPair> sw{{random_affine(rng, 2), random_affine(rng, 2)}};
  return Problem(default_names(2), f, {}, ineq, sw);
}

Problem random_convex_qp(Rng& rng) {
  // f = 1/2 (x - c)^T A (x - c) with A = L L^T + 0.5 I.
  const double l11 = uniform(rng, 0.5, 1.5), l21 = uniform(rng, -0.8, 0.8), l22 = uniform(rng, 0.5, 1.5);
  const double a11 = l11 * l11 + 0.5, a12 = l11 * l21, a22 = l21 * l21 + l22 * l22 + 0.5;
  const Expr d1 = Expr::variable(0) - Expr::constant(uniform(rng, -1.0, 1.0));
  const Expr d2 = Expr::variable(1) - Expr::constant(uniform(rng, -1.0, 1.0));
  const Expr half = Expr::constant(0.5);
  const Expr f = half * Expr::constant(a11) * pow(d1, 2) + Expr::constant(a12) * d1 * d2 +
                 half * Expr::constant(a22) * pow(d2, 2);
  const Expr g = Expr::constant(uniform(rng, -0.5, 0.5)) + Expr::constant(uniform(rng, -1.0, 1.0)) * Expr::variable(0) +
                 Expr::constant(uniform(rng, -1.0, 1.0)) * Expr::variable(1);
  return Problem(default_names(2), f, {}, {g}, {});
}

}  // namespace mpsc::testing
