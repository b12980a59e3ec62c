#pragma once

#include <random>
#include <vector>

#include "mpsc/stationarity.hpp"

namespace mpsc::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
Vector random_point(Rng& rng, int n, double lo, double hi);

/// Sum of monomials of total degree <= degree, each kept with probability
/// `density`, coefficients uniform in [-scale, scale].
Expr random_polynomial(Rng& rng, int n, int degree, double density = 0.7, double scale = 1.0);

/// Random tree mixing + - * / ^ sin cos exp log, defined everywhere on R^n.
Expr random_smooth_expr(Rng& rng, int n, int depth);

struct RandomMpscShape {
  int max_n = 3;
  int max_k = 2;
  int max_j = 2;
  int degree = 3;
};

/// Polynomial MPSC with random n, k, |J| within the shape limits and no equalities.
Problem random_mpsc(Rng& rng, const RandomMpscShape& shape = {});

/// n = 2, one switching pair with affine F1, F2, at most one affine inequality,
/// quadratic-plus-cubic objective.
Problem random_planar_mpsc(Rng& rng, bool with_inequality);

/// Strictly convex 2-D quadratic with one linear inequality, k = 0.
Problem random_convex_qp(Rng& rng);

std::vector<std::string> default_names(int n);

}  // namespace mpsc::testing
