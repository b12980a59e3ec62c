#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpsc/stationarity.hpp"

namespace mpsc {

class LicqViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SubsetCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NDReport {
  bool nd1 = false;  // LICQ
  bool nd2 = false;  // mu_j > 0 on J0
  bool nd3 = false;  // sigma1 * sigma2 != 0 on beta
  bool nd4 = false;  // restricted Lagrangian Hessian nonsingular
  int licq_rank = 0;
  int licq_rows = 0;
  std::vector<int> nd2_failures;  // j in J0 with mu_j <= tol
  std::vector<int> nd3_failures;  // m in beta with a vanishing multiplier
  Inertia restricted_inertia;

  bool nondegenerate() const { return nd1 && nd2 && nd3 && nd4; }
};

struct WIndex {
  int qi = 0;  // negative eigenvalues of the restricted Hessian
  int bi = 0;  // |beta|
  int w = 0;   // qi + bi
  int tangent_dim = 0;
  bool degenerate = false;  // restricted Hessian singular
};

enum class FailureReason { None, Nd3Fails, SingularSubset, SignMismatch };

std::string to_string(FailureReason r);

struct SubsetResult {
  std::vector<int> jstar;  // J_* as inequality indices
  int dimension = 0;       // dim of the tangent space of M_*
  int det_sign = 1;
};

struct StabilityVerdict {
  bool strongly_stable = false;
  bool nd3_holds = false;
  std::vector<int> j_plus;
  std::vector<SubsetResult> subset_results;
  FailureReason failure_reason = FailureReason::None;
};

enum class PointKind { Minimizer, Saddle, HigherIndex, Degenerate };

std::string to_string(PointKind k);

struct Classification {
  double objective = 0.0;
  NDReport nd;
  WIndex index;
  PointKind kind = PointKind::Degenerate;
  bool is_local_minimizer = false;
  /// Empty when LICQ fails: strong stability is then outside the theorem's scope.
  std::optional<StabilityVerdict> stability;
};

/// Gradient stack {Dh; Dg (J_*); DF1 (alpha); DF2 (gamma); DF1, DF2 (beta)}.
Matrix tangent_constraints(const Problem& p, const Vector& x, const IndexSets& idx, const std::vector<int>& jstar);

/// Orthonormal basis of the tangent space of M_*; requires LICQ.
Matrix tangent_basis(const Problem& p, const Vector& x, const IndexSets& idx, const std::vector<int>& jstar,
                     const ToleranceConfig& tol = {});

/// D^2 f - sum lambda D^2 h - sum mu D^2 g - sum (sigma1 D^2 F1 + sigma2 D^2 F2).
Matrix lagrangian_hessian(const Problem& p, const Vector& x, const Multipliers& mult);

WIndex quadratic_index(const Problem& p, const Vector& x, const Multipliers& mult, const IndexSets& idx,
                       const ToleranceConfig& tol = {});

NDReport check_nondegeneracy(const Problem& p, const Vector& x, const Multipliers& mult, const IndexSets& idx,
                             const ToleranceConfig& tol = {});

StabilityVerdict check_strong_stability(const Problem& p, const Vector& x, const Multipliers& mult,
                                        const IndexSets& idx, const ToleranceConfig& tol = {},
                                        std::size_t subset_cap = 4096);

Classification classify_point(const Problem& p, const Vector& x, const Multipliers& mult, const IndexSets& idx,
                              const ToleranceConfig& tol = {});

inline Classification classify_point(const Problem& p, const WStationaryPoint& pt, const ToleranceConfig& tol = {}) {
  return classify_point(p, pt.x, pt.mult, pt.idx, tol);
}

}  // namespace mpsc
