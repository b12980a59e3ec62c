#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpsc/classify.hpp"
#include "support/random_mpsc.hpp"

namespace mpsc::testing {

/// Residual of the multiplier rule, complementarity, sign and feasibility,
/// written out term by term from the problem functions.
double oracle_residual(const Problem& p, const Vector& x, const Multipliers& m);

/// Every point of `a` has a partner in `b` within `radius` and vice versa.
bool same_point_set(const std::vector<WStationaryPoint>& a, const std::vector<WStationaryPoint>& b, double radius);

/// Index of the point of `pts` nearest to x, or -1 beyond `radius`.
int find_point(const std::vector<WStationaryPoint>& pts, const Vector& x, double radius);

struct PropertyOutcome {
  std::string name;
  int checked = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

struct SuiteReport {
  int problems = 0;
  int points = 0;
  std::vector<PropertyOutcome> properties;  // (a) .. (f)

  bool ok() const;
};

/// Random polynomial MPSC property suite; search settings come from `cfg`.
SuiteReport run_property_suite(int count, std::uint64_t seed, const StationarityConfig& cfg);

/// Search settings used by the random suites.
StationarityConfig suite_config();

}  // namespace mpsc::testing
