#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mpsc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when an expression is evaluated outside its domain
/// (log of a nonpositive argument, division by zero, 0 to a negative power).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or semantic error in a problem file, with 1-based position.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UndeclaredVariable, EmptyObjective };

  ParseError(Kind kind, int line, int column, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

enum class Op {
  Constant,
  Variable,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Sin,
  Cos,
  Exp,
  Log,
};

struct Node;

/// Immutable expression tree over variables x_0..x_{n-1}. Copies share nodes.
class Expr {
 public:
  Expr() = default;  // the constant 0

  static Expr constant(double value);
  static Expr variable(int index);

  Op op() const;
  double value() const;    // Constant only
  int index() const;       // Variable only
  int exponent() const;    // Pow only
  const Expr& lhs() const;  // binary ops, Pow base, unary argument
  const Expr& rhs() const;  // binary ops

  /// One past the largest referenced variable index (0 for constants).
  int arity() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, int exponent);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Op op, Expr a, Expr b = Expr());

  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Constant;
  double value = 0.0;
  int index = 0;
  Expr a;
  Expr b;
  int arity = 0;
};

bool structurally_equal(const Expr& a, const Expr& b);

double eval_value(const Expr& e, const Vector& x);
Vector eval_gradient(const Expr& e, const Vector& x);
/// Exact second derivatives; the result is bitwise symmetric.
Matrix eval_hessian(const Expr& e, const Vector& x);

/// Value, gradient and Hessian in a single forward sweep.
struct Jet {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

Jet eval_jet(const Expr& e, const Vector& x);

/// Prints with the parser's syntax; `names[i]` is used for variable i.
std::string to_string(const Expr& e, const std::vector<std::string>& names);

struct SwitchPair {
  Expr first;
  Expr second;
};

/// MPSC data: min f s.t. h_i = 0, g_j >= 0, F1_m * F2_m = 0.
class Problem {
 public:
  Problem(std::vector<std::string> variable_names, Expr objective, std::vector<Expr> equalities,
          std::vector<Expr> inequalities, std::vector<SwitchPair> switches);

  int dimension() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& variable_names() const { return names_; }
  const Expr& objective() const { return objective_; }
  const std::vector<Expr>& equalities() const { return equalities_; }
  const std::vector<Expr>& inequalities() const { return inequalities_; }
  const std::vector<SwitchPair>& switches() const { return switches_; }

  int num_equalities() const { return static_cast<int>(equalities_.size()); }
  int num_inequalities() const { return static_cast<int>(inequalities_.size()); }
  int num_switches() const { return static_cast<int>(switches_.size()); }

  Problem with_objective(Expr objective) const;
  Problem with_switches_swapped() const;

 private:
  std::vector<std::string> names_;
  Expr objective_;
  std::vector<Expr> equalities_;
  std::vector<Expr> inequalities_;
  std::vector<SwitchPair> switches_;
};

Problem parse_problem(const std::string& text);
Expr parse_expression(const std::string& text, const std::vector<std::string>& names);
std::string to_string(const Problem& p);

}  // namespace mpsc
