#include "mpsc/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace mpsc {

namespace {

const Node& zero_node() {
  static const Node node;
  return node;
}

}  // namespace

ParseError::ParseError(Kind kind, int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

Expr Expr::constant(double value) {
  auto node = std::make_shared<Node>();
  node->op = Op::Constant;
  node->value = value;
  return Expr(std::move(node));
}

Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("variable index must be nonnegative");
  auto node = std::make_shared<Node>();
  node->op = Op::Variable;
  node->index = index;
  node->arity = index + 1;
  return Expr(std::move(node));
}

Expr Expr::make(Op op, Expr a, Expr b) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->arity = std::max(a.arity(), b.arity());
  node->a = std::move(a);
  node->b = std::move(b);
  return Expr(std::move(node));
}

Op Expr::op() const { return node_ ? node_->op : Op::Constant; }
double Expr::value() const { return node_ ? node_->value : 0.0; }
int Expr::index() const { return node_ ? node_->index : 0; }
int Expr::exponent() const { return node_ ? node_->index : 0; }
const Expr& Expr::lhs() const { return node_ ? node_->a : zero_node().a; }
const Expr& Expr::rhs() const { return node_ ? node_->b : zero_node().b; }
int Expr::arity() const { return node_ ? node_->arity : 0; }

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::make(Op::Neg, a); }
Expr sin(const Expr& a) { return Expr::make(Op::Sin, a); }
Expr cos(const Expr& a) { return Expr::make(Op::Cos, a); }
Expr exp(const Expr& a) { return Expr::make(Op::Exp, a); }
Expr log(const Expr& a) { return Expr::make(Op::Log, a); }

Expr pow(const Expr& base, int exponent) {
  auto node = std::make_shared<Node>();
  node->op = Op::Pow;
  node->index = exponent;
  node->arity = base.arity();
  node->a = base;
  return Expr(std::move(node));
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Constant:
      return a.value() == b.value();
    case Op::Variable:
      return a.index() == b.index();
    case Op::Pow:
      return a.exponent() == b.exponent() && structurally_equal(a.lhs(), b.lhs());
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
    default:
      return structurally_equal(a.lhs(), b.lhs());
  }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double checked_log(double u) {
  if (!(u > 0.0)) throw DomainError("log of nonpositive argument");
  return std::log(u);
}

double checked_reciprocal(double u) {
  if (u == 0.0) throw DomainError("division by zero");
  return 1.0 / u;
}

double int_pow(double u, int k) {
  if (k < 0 && u == 0.0) throw DomainError("zero raised to a negative power");
  return std::pow(u, k);
}

double value_of(const Expr& e, const Vector& x) {
  switch (e.op()) {
    case Op::Constant:
      return e.value();
    case Op::Variable:
      return x[e.index()];
    case Op::Add:
      return value_of(e.lhs(), x) + value_of(e.rhs(), x);
    case Op::Sub:
      return value_of(e.lhs(), x) - value_of(e.rhs(), x);
    case Op::Mul:
      return value_of(e.lhs(), x) * value_of(e.rhs(), x);
    case Op::Div:
      return value_of(e.lhs(), x) * checked_reciprocal(value_of(e.rhs(), x));
    case Op::Pow:
      return int_pow(value_of(e.lhs(), x), e.exponent());
    case Op::Neg:
      return -value_of(e.lhs(), x);
    case Op::Sin:
      return std::sin(value_of(e.lhs(), x));
    case Op::Cos:
      return std::cos(value_of(e.lhs(), x));
    case Op::Exp:
      return std::exp(value_of(e.lhs(), x));
    case Op::Log:
      return checked_log(value_of(e.lhs(), x));
  }
  return 0.0;
}

// Forward propagation of (value, gradient, Hessian). With `order == 1` the
// Hessian stays empty.
class JetEvaluator {
 public:
  JetEvaluator(const Vector& x, int order) : x_(x), n_(static_cast<int>(x.size())), order_(order) {}

  Jet run(const Expr& e) const {
    switch (e.op()) {
      case Op::Constant:
        return constant(e.value());
      case Op::Variable: {
        Jet j = constant(x_[e.index()]);
        j.gradient[e.index()] = 1.0;
        return j;
      }
      case Op::Add: {
        Jet a = run(e.lhs());
        Jet b = run(e.rhs());
        a.value += b.value;
        a.gradient += b.gradient;
        if (order_ > 1) a.hessian += b.hessian;
        return a;
      }
      case Op::Sub: {
        Jet a = run(e.lhs());
        Jet b = run(e.rhs());
        a.value -= b.value;
        a.gradient -= b.gradient;
        if (order_ > 1) a.hessian -= b.hessian;
        return a;
      }
      case Op::Mul:
        return product(run(e.lhs()), run(e.rhs()));
      case Op::Div: {
        const Jet b = run(e.rhs());
        const double r = checked_reciprocal(b.value);
        return product(run(e.lhs()), chain(b, r, -r * r, 2.0 * r * r * r));
      }
      case Op::Pow: {
        const Jet u = run(e.lhs());
        const int k = e.exponent();
        if (k == 0) return constant(1.0);
        const double d1 = k * int_pow(u.value, k - 1);
        const double d2 = (k == 1) ? 0.0 : k * (k - 1) * int_pow(u.value, k - 2);
        return chain(u, int_pow(u.value, k), d1, d2);
      }
      case Op::Neg: {
        Jet a = run(e.lhs());
        a.value = -a.value;
        a.gradient = -a.gradient;
        if (order_ > 1) a.hessian = -a.hessian;
        return a;
      }
      case Op::Sin: {
        const Jet u = run(e.lhs());
        const double s = std::sin(u.value);
        return chain(u, s, std::cos(u.value), -s);
      }
      case Op::Cos: {
        const Jet u = run(e.lhs());
        const double c = std::cos(u.value);
        return chain(u, c, -std::sin(u.value), -c);
      }
      case Op::Exp: {
        const Jet u = run(e.lhs());
        const double v = std::exp(u.value);
        return chain(u, v, v, v);
      }
      case Op::Log: {
        const Jet u = run(e.lhs());
        const double v = checked_log(u.value);
        const double r = 1.0 / u.value;
        return chain(u, v, r, -r * r);
      }
    }
    return constant(0.0);
  }

 private:
  Jet constant(double v) const {
    Jet j;
    j.value = v;
    j.gradient = Vector::Zero(n_);
    if (order_ > 1) j.hessian = Matrix::Zero(n_, n_);
    return j;
  }

  Jet product(const Jet& a, const Jet& b) const {
    Jet j;
    j.value = a.value * b.value;
    j.gradient = b.value * a.gradient + a.value * b.gradient;
    if (order_ > 1) {
      j.hessian = b.value * a.hessian + a.value * b.hessian + a.gradient * b.gradient.transpose() +
                  b.gradient * a.gradient.transpose();
    }
    return j;
  }

  // phi(u) given phi, phi', phi'' at u.value.
  Jet chain(const Jet& u, double v, double d1, double d2) const {
    Jet j;
    j.value = v;
    j.gradient = d1 * u.gradient;
    if (order_ > 1) j.hessian = d1 * u.hessian + d2 * (u.gradient * u.gradient.transpose());
    return j;
  }

  const Vector& x_;
  int n_;
  int order_;
};

void check_dimension(const Expr& e, const Vector& x) {
  if (e.arity() > x.size()) throw std::invalid_argument("point dimension smaller than expression arity");
}

}  // namespace

double eval_value(const Expr& e, const Vector& x) {
  check_dimension(e, x);
  return value_of(e, x);
}

Vector eval_gradient(const Expr& e, const Vector& x) {
  check_dimension(e, x);
  return JetEvaluator(x, 1).run(e).gradient;
}

Jet eval_jet(const Expr& e, const Vector& x) {
  check_dimension(e, x);
  Jet j = JetEvaluator(x, 2).run(e);
  // mirror the upper triangle so the result is exactly symmetric
  j.hessian.triangularView<Eigen::StrictlyLower>() = j.hessian.transpose();
  return j;
}

Matrix eval_hessian(const Expr& e, const Vector& x) { return eval_jet(e, x).hessian; }

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr int kSumPrec = 1;
constexpr int kProductPrec = 2;
constexpr int kUnaryPrec = 3;
constexpr int kPowerPrec = 4;
constexpr int kAtomPrec = 5;

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string print(const Expr& e, const std::vector<std::string>& names, int min_prec) {
  std::string s;
  int prec = kAtomPrec;
  switch (e.op()) {
    case Op::Constant:
      s = format_number(e.value());
      if (e.value() < 0 || std::signbit(e.value())) prec = kUnaryPrec;
      break;
    case Op::Variable:
      s = e.index() < static_cast<int>(names.size()) ? names[e.index()]
                                                     : "x" + std::to_string(e.index() + 1);
      break;
    case Op::Add:
      s = print(e.lhs(), names, kSumPrec) + " + " + print(e.rhs(), names, kProductPrec);
      prec = kSumPrec;
      break;
    case Op::Sub:
      s = print(e.lhs(), names, kSumPrec) + " - " + print(e.rhs(), names, kProductPrec);
      prec = kSumPrec;
      break;
    case Op::Mul:
      s = print(e.lhs(), names, kProductPrec) + " * " + print(e.rhs(), names, kUnaryPrec);
      prec = kProductPrec;
      break;
    case Op::Div:
      s = print(e.lhs(), names, kProductPrec) + " / " + print(e.rhs(), names, kUnaryPrec);
      prec = kProductPrec;
      break;
    case Op::Neg:
      s = "-" + print(e.lhs(), names, kUnaryPrec);
      prec = kUnaryPrec;
      break;
    case Op::Pow:
      s = print(e.lhs(), names, kAtomPrec) + "^" + std::to_string(e.exponent());
      prec = kPowerPrec;
      break;
    case Op::Sin:
      s = "sin(" + print(e.lhs(), names, 0) + ")";
      break;
    case Op::Cos:
      s = "cos(" + print(e.lhs(), names, 0) + ")";
      break;
    case Op::Exp:
      s = "exp(" + print(e.lhs(), names, 0) + ")";
      break;
    case Op::Log:
      s = "log(" + print(e.lhs(), names, 0) + ")";
      break;
  }
  return prec < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string to_string(const Expr& e, const std::vector<std::string>& names) {
  return print(e, names, 0);
}

// ---------------------------------------------------------------------------
// Problem

Problem::Problem(std::vector<std::string> variable_names, Expr objective,
                 std::vector<Expr> equalities, std::vector<Expr> inequalities,
                 std::vector<SwitchPair> switches)
    : names_(std::move(variable_names)),
      objective_(std::move(objective)),
      equalities_(std::move(equalities)),
      inequalities_(std::move(inequalities)),
      switches_(std::move(switches)) {
  if (names_.empty()) throw std::invalid_argument("problem needs at least one variable");
  const int n = dimension();
  auto check = [n](const Expr& e) {
    if (e.arity() > n) throw std::invalid_argument("expression references an undeclared variable");
  };
  check(objective_);
  for (const auto& e : equalities_) check(e);
  for (const auto& e : inequalities_) check(e);
  for (const auto& s : switches_) {
    check(s.first);
    check(s.second);
  }
}

Problem Problem::with_objective(Expr objective) const {
  return Problem(names_, std::move(objective), equalities_, inequalities_, switches_);
}

Problem Problem::with_switches_swapped() const {
  std::vector<SwitchPair> swapped;
  swapped.reserve(switches_.size());
  for (const auto& s : switches_) swapped.push_back({s.second, s.first});
  return Problem(names_, objective_, equalities_, inequalities_, std::move(swapped));
}

std::string to_string(const Problem& p) {
  const auto& names = p.variable_names();
  std::string out = "vars:";
  for (const auto& name : names) out += " " + name;
  out += "\nobjective: " + to_string(p.objective(), names) + "\n";
  for (const auto& e : p.equalities()) out += "eq: " + to_string(e, names) + "\n";
  for (const auto& e : p.inequalities()) out += "ineq: " + to_string(e, names) + "\n";
  for (const auto& s : p.switches()) {
    out += "switch: " + to_string(s.first, names) + " | " + to_string(s.second, names) + "\n";
  }
  return out;
}

}  // namespace mpsc
