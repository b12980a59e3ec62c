#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpsc/expr.hpp"
#include "mpsc/linalg.hpp"

namespace mpsc {

/// Active index sets at a point. All indices are 0-based.
struct IndexSets {
  std::vector<int> J0;     // active inequalities
  std::vector<int> alpha;  // F1 = 0, F2 != 0
  std::vector<int> beta;   // F1 = F2 = 0
  std::vector<int> gamma;  // F1 != 0, F2 = 0

  friend bool operator==(const IndexSets&, const IndexSets&) = default;
};

struct Multipliers {
  Vector lambda;  // equalities
  Vector mu;      // inequalities, zero off J0
  Vector sigma1;  // F1 per switching pair
  Vector sigma2;  // F2 per switching pair
  /// False when LICQ fails and the reported values are one choice among many.
  bool unique = true;

  static Multipliers zeros(const Problem& p);
};

enum class SwitchBranch { S1, S2, Both };
enum class InequalityBranch { Inactive, Active };

/// One casewise realisation of the complementarity conditions.
struct BranchPattern {
  std::vector<SwitchBranch> switches;
  std::vector<InequalityBranch> inequalities;

  friend bool operator==(const BranchPattern&, const BranchPattern&) = default;
};

std::string to_string(const BranchPattern& pattern);

struct WStationaryPoint {
  Vector x;
  Multipliers mult;
  IndexSets idx;
  double residual = 0.0;
  BranchPattern source_pattern;
  bool licq = true;
};

class InfeasiblePointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotStationaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CombinatorialExplosionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StationarityConfig {
  ToleranceConfig tol;
  int starts_per_axis = 5;
  int max_iter = 50;
  int max_halvings = 20;
  std::size_t pattern_cap = 100000;
  unsigned threads = 1;
  /// Nonzero seeds jitter the multi-start grid reproducibly.
  std::uint64_t seed = 0;
};

struct Box {
  Vector lo;
  Vector hi;

  static Box uniform(int n, double lo, double hi);
  bool contains(const Vector& x, double inflate_fraction = 0.0) const;
};

IndexSets active_sets(const Problem& p, const Vector& x, const ToleranceConfig& tol = {});

/// Rows: Dh (I), DF1 (alpha), DF2 (gamma), Dg (J0), DF1 and DF2 interleaved (beta).
Matrix licq_matrix(const Problem& p, const Vector& x, const IndexSets& idx);

struct LicqReport {
  bool holds = true;
  int rank = 0;
  int rows = 0;
};

/// Max violation of h = 0, g >= 0 and F1 * F2 = 0.
double infeasibility(const Problem& p, const Vector& x);

LicqReport check_licq(const Problem& p, const Vector& x, const ToleranceConfig& tol = {});

/// Unique multipliers under LICQ; otherwise the minimum-norm least-squares
/// multipliers flagged as non-unique.
Multipliers recover_multipliers(const Problem& p, const Vector& x, const ToleranceConfig& tol = {});

/// Max-norm residual of the multiplier rule, complementarity and feasibility,
/// evaluated directly from the problem functions.
double w_residual(const Problem& p, const Vector& x, const Multipliers& m);

/// Smallest mu_j (0 when there are no inequalities).
double min_inequality_multiplier(const Multipliers& m);

std::vector<BranchPattern> enumerate_branches(const Problem& p, std::size_t cap = 100000);

struct NewtonOutcome {
  std::optional<WStationaryPoint> candidate;  // idx left empty; filled by the caller
  bool singular = false;
  bool domain_error = false;
  int iterations = 0;
};

NewtonOutcome newton_solve_branch(const Problem& p, const BranchPattern& pattern, const Vector& start,
                                  const StationarityConfig& cfg = {});

/// Variant with a warm-start for the multipliers (used by continuation).
NewtonOutcome newton_solve_branch(const Problem& p, const BranchPattern& pattern, const Vector& start,
                                  const Multipliers& start_mult, const StationarityConfig& cfg);

struct StationarySearch {
  std::vector<WStationaryPoint> points;
  /// Converged candidates violating mu >= 0.
  std::vector<WStationaryPoint> rejected_sign;
  std::size_t solves = 0;
  std::size_t singular_solves = 0;
};

StationarySearch find_stationary_points(const Problem& p, const Box& box, const StationarityConfig& cfg = {});

/// Full acceptance check of a W-stationary pair: residual, sign and box-free feasibility.
bool is_w_stationary(const Problem& p, const Vector& x, const Multipliers& m, const ToleranceConfig& tol);

}  // namespace mpsc
