#pragma once

#include <Eigen/Dense>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Every numerical threshold used to interpret exact-arithmetic conditions.
struct ToleranceConfig {
  double rank_scale = 1e-10;    // relative rank threshold factor
  double rank_floor = 1e-14;    // absolute rank threshold
  double eig_deadzone = 1e-8;   // eigenvalues within +-deadzone*max(1,scale) count as zero
  double active = 1e-8;         // |g_j|, |F| below this are active
  double feas = 1e-8;           // feasibility slack
  double resid = 1e-10;         // W-stationarity residual bound
  double sign = 1e-8;           // dead zone for mu >= 0, mu > 0, sigma != 0
  double comp = 1e-8;           // complementarity products
  double dedup = 1e-6;          // merge radius for stationary points
  double match = 1e-4;          // continuation limit matching radius

  /// Sets a field by name; throws std::invalid_argument for unknown keys.
  void set(const std::string& key, double value);
  std::map<std::string, double> as_map() const;
};

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Inertia {
  int n_neg = 0;
  int n_zero = 0;
  int n_pos = 0;

  int dimension() const { return n_neg + n_zero + n_pos; }
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Threshold below which a pivot of a column-pivoted QR counts as zero.
double rank_threshold(const Matrix& a, double largest_pivot, const ToleranceConfig& tol = {});

int rank(const Matrix& a, const ToleranceConfig& tol = {});

/// Orthonormal basis (n x d) of {v : a v = 0}.
Matrix nullspace_basis(const Matrix& a, const ToleranceConfig& tol = {});

/// Least-squares solve for square or tall `a` with full column rank.
Vector solve_linear(const Matrix& a, const Vector& b, const ToleranceConfig& tol = {});

/// Minimum-norm least-squares solution; never throws for rank deficiency.
Vector solve_min_norm(const Matrix& a, const Vector& b, const ToleranceConfig& tol = {});

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
Vector symmetric_eigenvalues(const Matrix& s);

Inertia inertia(const Matrix& s, const ToleranceConfig& tol = {});

/// -1, 0 or +1; the empty matrix has sign +1.
int det_sign(const Matrix& s, const ToleranceConfig& tol = {});
int det_sign(const Inertia& in);

}  // namespace mpsc
