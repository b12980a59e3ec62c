#include <cmath>
#include <thread>

#include "doctest.h"
#include "support/random_mpsc.hpp"

using namespace mpsc;
using namespace mpsc::testing;

namespace {

const std::vector<std::string> kNames{"x1", "x2"};

Expr px(const std::string& text) { return parse_expression(text, kNames); }

Vector pt(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

// Central differences with step 1e-5 * max(1, |x_i|).
Vector fd_gradient(const Expr& e, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (eval_value(e, a) - eval_value(e, b)) / (2 * h);
  }
  return g;
}

Matrix fd_hessian(const Expr& e, const Vector& x) {
  Matrix hess(x.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    hess.col(i) = (eval_gradient(e, a) - eval_gradient(e, b)) / (2 * h);
  }
  return hess;
}

}  // namespace

TEST_CASE("eval_value on hand examples") {
  CHECK(eval_value(px("x1 * x2"), pt(3, 0)) == 0.0);
  CHECK(eval_value(px("(x1 - 1)^2 + (x2 - 1)^2"), pt(0, 0)) == 2.0);
  CHECK(eval_value(px("x1 + x2"), pt(-1, -1)) == -2.0);
  CHECK(eval_value(px("x1^-2"), pt(2, 0)) == doctest::Approx(0.25));
  CHECK(eval_value(px("exp(0) + log(1) + sin(0) + cos(0)"), pt(0, 0)) == 2.0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(eval_value(px("log(x1)"), pt(0, 1)), DomainError);
  CHECK_THROWS_AS(eval_value(px("log(x1)"), pt(-1, 1)), DomainError);
  CHECK_THROWS_AS(eval_value(px("1 / x2"), pt(1, 0)), DomainError);
  CHECK_THROWS_AS(eval_gradient(px("x1^-1"), pt(0, 0)), DomainError);
  CHECK_THROWS_AS(eval_hessian(px("x2 * log(x1)"), pt(0, 0)), DomainError);
}

TEST_CASE("gradients on hand examples") {
  CHECK(eval_gradient(px("(x1 - 1)^2 + (x2 - 1)^2"), pt(0, 0)).isApprox(pt(-2, -2)));
  CHECK(eval_gradient(px("x1 * x2"), pt(0.7, -1.3)).isApprox(pt(-1.3, 0.7)));
  CHECK(eval_gradient(px("x1 * x2"), pt(0, 0)) == pt(0, 0));
  CHECK(eval_gradient(px("x1 + x2"), pt(5, -8)) == pt(1, 1));
}

TEST_CASE("Hessians on hand examples") {
  Matrix diag2 = Matrix::Identity(2, 2) * 2.0;
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(eval_hessian(px("(x1 - 1)^2 + (x2 - 1)^2"), pt(0.3, 4)) == diag2);
  CHECK(eval_hessian(px("x1 * x2"), pt(-2, 9)) == swap);
  CHECK(eval_hessian(px("x1 + x2"), pt(1, 1)) == Matrix::Zero(2, 2));
}

TEST_CASE("forward derivatives match central differences on random expressions") {
  Rng rng(1234);
  int grad_checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 3;
    const Expr e = random_smooth_expr(rng, n, 1 + trial % 4);
    const Vector x = random_point(rng, n, -1.5, 1.5);
    const Jet jet = eval_jet(e, x);
    const Vector g_fd = fd_gradient(e, x);
    const Matrix h_fd = fd_hessian(e, x);
    const double gerr = (jet.gradient - g_fd).norm() / std::max(1.0, jet.gradient.norm());
    const double herr = (jet.hessian - h_fd).norm() / std::max(1.0, jet.hessian.norm());
    INFO("expr: " << to_string(e, default_names(n)));
    CHECK(gerr <= 1e-6);
    CHECK(herr <= 1e-5);
    CHECK(jet.value == eval_value(e, x));
    CHECK(jet.gradient == eval_gradient(e, x));
    ++grad_checked;
  }
  CHECK(grad_checked == 1000);
}

TEST_CASE("Hessians are bitwise symmetric") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const Expr e = random_smooth_expr(rng, 3, 3);
    const Matrix h = eval_hessian(e, random_point(rng, 3, -1, 1));
    CHECK(h == h.transpose());
  }
}

TEST_CASE("concurrent evaluation is reentrant") {
  Rng rng(5);
  const Expr e = random_smooth_expr(rng, 2, 4);
  const Vector x = pt(0.3, -0.4);
  const Jet ref = eval_jet(e, x);
  std::vector<std::thread> workers;
  std::vector<int> ok(4, 0);
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t] {
      bool same = true;
      for (int i = 0; i < 200; ++i) same = same && eval_jet(e, x).hessian == ref.hessian;
      ok[t] = same;
    });
  }
  for (auto& w : workers) w.join();
  for (int v : ok) CHECK(v == 1);
}

TEST_CASE("arity and structural equality") {
  const Expr e = px("x2 * sin(x1)");
  CHECK(e.arity() == 2);
  CHECK(Expr::constant(3).arity() == 0);
  CHECK(structurally_equal(e, px("x2*sin(x1)")));
  CHECK_FALSE(structurally_equal(e, px("sin(x1) * x2")));
  CHECK(structurally_equal(Expr(), Expr::constant(0)));
}
