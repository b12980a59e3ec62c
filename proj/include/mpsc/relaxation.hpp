#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpsc/stationarity.hpp"

namespace mpsc {

/// Scholtes relaxation: each F1 * F2 = 0 becomes t - F1 F2 >= 0 and t + F1 F2 >= 0.
struct RelaxedProblem {
  Problem base;
  double t;
  /// Standard NLP without switching pairs; the 2k relaxation inequalities follow
  /// the original ones, ordered (t - F1 F2, t + F1 F2) per pair.
  Problem nlp;
};

RelaxedProblem relax(const Problem& p, double t);

std::vector<WStationaryPoint> kkt_points_relaxed(const RelaxedProblem& rp, const Box& box,
                                                 const StationarityConfig& cfg = {});

struct PathSample {
  double t = 0.0;
  Vector x;
  Multipliers mult;
  double kkt_residual = 0.0;
  BranchPattern pattern;
};

struct ContinuationOptions {
  double rho = 0.5;
  double t_min = 1e-10;
};

struct ContinuationPath {
  std::vector<PathSample> samples;
  /// Estimate of lim x_t as t -> 0: linear extrapolation in sqrt(t) through the
  /// last two samples (the final sample itself when fewer exist).
  Vector limit;
  Vector final_x;
  /// Index into the stationary list passed to continue_path.
  std::optional<std::size_t> matched_index;
  double match_distance = 0.0;
  /// Largest |multiplier| at the final sample; blow-up is reported, not an error.
  double final_multiplier_norm = 0.0;
  bool lost = false;
  std::string message;
};

/// Follows a KKT point of relax(p, t0) along t_{i+1} = rho t_i down to t_min.
ContinuationPath continue_path(const Problem& p, const WStationaryPoint& seed, double t0,
                               const ContinuationOptions& opts, const StationarityConfig& cfg,
                               const std::vector<WStationaryPoint>& stationary = {});

}  // namespace mpsc
