#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpsc/classify.hpp"
#include "mpsc/stationarity.hpp"

namespace mpsc {

class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Regular lattice over a box, n <= 3.
struct GridSpec {
  Box box;
  int resolution = 401;  // nodes per axis

  static int default_resolution(int n) { return n == 3 ? 101 : 401; }

  int dimension() const { return static_cast<int>(box.lo.size()); }
  double spacing(int axis) const { return (box.hi[axis] - box.lo[axis]) / (resolution - 1); }
  std::size_t node_count() const;
  Vector node(std::size_t flat) const;
  void validate() const;
};

/// Feasibility mask plus objective values on a grid; reusable across levels.
class SublevelProbe {
 public:
  SublevelProbe(const Problem& p, const GridSpec& grid, double feas_scale = 1.0);

  const GridSpec& grid() const { return grid_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  const std::vector<double>& objective_values() const { return f_; }

  /// Connected components of {feasible nodes with f <= a} under 8/26-connectivity.
  int components(double a) const;
  /// Component label per node (-1 outside the sub-level set), labels 0..count-1.
  std::vector<int> labels(double a, int* count = nullptr) const;

  /// Smallest and largest f over feasible nodes; nullopt when none is feasible.
  std::optional<std::pair<double, double>> feasible_range() const;
  /// Smallest and largest finite f over all grid nodes.
  std::optional<std::pair<double, double>> objective_range() const;

 private:
  GridSpec grid_;
  std::vector<std::uint8_t> mask_;
  std::vector<double> f_;
  std::vector<std::ptrdiff_t> neighbor_offsets_;  // lexicographically smaller neighbours
  std::vector<std::array<int, 3>> neighbor_steps_;
};

std::vector<std::uint8_t> feasibility_mask(const Problem& p, const GridSpec& grid, double feas_scale = 1.0);

int sublevel_components(const Problem& p, const GridSpec& grid, double a);

struct LevelSweep {
  std::vector<double> levels;
  std::vector<int> counts;
  std::vector<double> change_levels;
};

LevelSweep sweep_levels(const SublevelProbe& probe, const std::vector<double>& levels);
LevelSweep sweep_levels(const Problem& p, const GridSpec& grid, const std::vector<double>& levels);

struct LevelChange {
  double from_level = 0.0;
  double to_level = 0.0;
  int from_count = 0;
  int to_count = 0;
  std::optional<double> nearest_value;  // closest stationary value of f
  double gap = 0.0;
  bool bracketed = false;
};

struct CriticalLevelReport {
  std::vector<LevelChange> changes;
  bool consistent = true;
};

/// Every count change must lie within one level step of a stationary value.
CriticalLevelReport critical_level_report(const LevelSweep& sweep, const std::vector<double>& stationary_values);

struct MountainPassHypotheses {
  bool compact = false;
  bool connected = false;
};

struct MountainPassReport {
  int r = 0;    // nondegenerate local minimizers
  int r_s = 0;  // W-index-one saddles
  bool holds = false;
  MountainPassHypotheses hypotheses;
  /// Coinciding stationary values; the inequality itself does not depend on them.
  std::vector<double> tied_values;
};

MountainPassReport mountain_pass_check(const std::vector<Classification>& classified,
                                       const MountainPassHypotheses& hypotheses = {});

}  // namespace mpsc
