#include "mpsc/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mpsc {

std::size_t GridSpec::node_count() const {
  std::size_t count = 1;
  for (int i = 0; i < dimension(); ++i) count *= static_cast<std::size_t>(resolution);
  return count;
}

Vector GridSpec::node(std::size_t flat) const {
  const int n = dimension();
  Vector x(n);
  for (int i = n - 1; i >= 0; --i) {
    const auto k = static_cast<int>(flat % resolution);
    flat /= resolution;
    x[i] = box.lo[i] + k * spacing(i);
  }
  return x;
}

void GridSpec::validate() const {
  const int n = dimension();
  if (n < 1 || n > 3) throw DimensionError("level-set probing supports 1 <= n <= 3, got n = " + std::to_string(n));
  if (box.hi.size() != n) throw std::invalid_argument("grid box dimension mismatch");
  if (resolution < 16) throw std::invalid_argument("grid resolution must be at least 16");
  for (int i = 0; i < n; ++i) {
    if (!(box.lo[i] < box.hi[i])) throw std::invalid_argument("grid box must satisfy lo < hi on every axis");
  }
}

namespace {

// Coordinates of a flat index, axis n-1 fastest.
std::array<int, 3> coords(std::size_t flat, int n, int res) {
  std::array<int, 3> c{0, 0, 0};
  for (int i = n - 1; i >= 0; --i) {
    c[i] = static_cast<int>(flat % res);
    flat /= res;
  }
  return c;
}

std::vector<double> sample(const Expr& e, const GridSpec& grid) {
  std::vector<double> v(grid.node_count());
  for (std::size_t k = 0; k < v.size(); ++k) {
    try {
      v[k] = eval_value(e, grid.node(k));
    } catch (const DomainError&) {
      v[k] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return v;
}

// Lattice finite-difference estimate of |grad c| at every node.
std::vector<double> gradient_magnitude(const std::vector<double>& c, const GridSpec& grid) {
  const int n = grid.dimension();
  const int res = grid.resolution;
  std::vector<std::size_t> stride(n);
  std::size_t s = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = s;
    s *= res;
  }
  std::vector<double> out(c.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto at = coords(k, n, res);
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t lo = at[i] > 0 ? k - stride[i] : k;
      const std::size_t hi = at[i] < res - 1 ? k + stride[i] : k;
      const double d = (c[hi] - c[lo]) / (static_cast<double>(hi - lo) / stride[i] * grid.spacing(i));
      if (std::isfinite(d)) sq += d * d;
    }
    out[k] = std::sqrt(sq);
  }
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<std::uint8_t> feasibility_mask(const Problem& p, const GridSpec& grid, double feas_scale) {
  grid.validate();
  if (p.dimension() != grid.dimension()) throw std::invalid_argument("grid dimension differs from problem dimension");
  const std::size_t count = grid.node_count();
  double h = 0.0;
  for (int i = 0; i < grid.dimension(); ++i) h = std::max(h, grid.spacing(i));

  std::vector<std::uint8_t> mask(count, 1);
  auto apply = [&](const std::vector<double>& c, auto&& feasible) {
    const std::vector<double> grad = gradient_magnitude(c, grid);
    for (std::size_t k = 0; k < count; ++k) {
      if (!mask[k]) continue;
      const double eps = feas_scale * h * (1.0 + grad[k]);
      if (!std::isfinite(c[k]) || !feasible(c[k], eps)) mask[k] = 0;
    }
  };
  for (const auto& e : p.equalities()) {
    apply(sample(e, grid), [](double v, double eps) { return std::abs(v) <= eps; });
  }
  for (const auto& e : p.inequalities()) {
    apply(sample(e, grid), [](double v, double eps) { return v >= -eps; });
  }
  for (const auto& s : p.switches()) {
    std::vector<double> prod = sample(s.first, grid);
    const std::vector<double> second = sample(s.second, grid);
    for (std::size_t k = 0; k < count; ++k) prod[k] *= second[k];
    apply(prod, [](double v, double eps) { return std::abs(v) <= eps; });
  }
  return mask;
}

SublevelProbe::SublevelProbe(const Problem& p, const GridSpec& grid, double feas_scale)
    : grid_(grid), mask_(feasibility_mask(p, grid, feas_scale)) {
  f_ = sample(p.objective(), grid_);
  for (double& v : f_) {
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
  }
  const int n = grid_.dimension();
  const int res = grid_.resolution;
  // Neighbours reached by steps in {-1,0,1}^n that precede the node in flat order.
  const int combos = n == 1 ? 3 : n == 2 ? 9 : 27;
  for (int code = 0; code < combos; ++code) {
    std::array<int, 3> step{0, 0, 0};
    int rest = code;
    std::ptrdiff_t offset = 0;
    for (int i = n - 1; i >= 0; --i) {
      step[i] = rest % 3 - 1;
      rest /= 3;
    }
    std::ptrdiff_t stride = 1;
    for (int i = n - 1; i >= 0; --i) {
      offset += step[i] * stride;
      stride *= res;
    }
    if (offset < 0) {
      neighbor_offsets_.push_back(offset);
      neighbor_steps_.push_back(step);
    }
  }
}

std::vector<int> SublevelProbe::labels(double a, int* count) const {
  const std::size_t total = grid_.node_count();
  const int n = grid_.dimension();
  const int res = grid_.resolution;
  auto inside = [&](std::size_t k) { return mask_[k] && f_[k] <= a; };

  UnionFind uf(total);
  for (std::size_t k = 0; k < total; ++k) {
    if (!inside(k)) continue;
    const auto at = coords(k, n, res);
    for (std::size_t s = 0; s < neighbor_offsets_.size(); ++s) {
      bool valid = true;
      for (int i = 0; i < n; ++i) {
        const int c = at[i] + neighbor_steps_[s][i];
        if (c < 0 || c >= res) valid = false;
      }
      if (!valid) continue;
      const auto other = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + neighbor_offsets_[s]);
      if (inside(other)) uf.unite(k, other);
    }
  }

  std::vector<int> label(total, -1);
  std::vector<int> root_label(total, -1);
  int next = 0;
  for (std::size_t k = 0; k < total; ++k) {
    if (!inside(k)) continue;
    const std::size_t r = uf.find(k);
    if (root_label[r] < 0) root_label[r] = next++;
    label[k] = root_label[r];
  }
  if (count) *count = next;
  return label;
}

int SublevelProbe::components(double a) const {
  int count = 0;
  labels(a, &count);
  return count;
}

std::optional<std::pair<double, double>> SublevelProbe::feasible_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < f_.size(); ++k) {
    if (!mask_[k] || !std::isfinite(f_[k])) continue;
    lo = std::min(lo, f_[k]);
    hi = std::max(hi, f_[k]);
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

std::optional<std::pair<double, double>> SublevelProbe::objective_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : f_) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

int sublevel_components(const Problem& p, const GridSpec& grid, double a) {
  return SublevelProbe(p, grid).components(a);
}

LevelSweep sweep_levels(const SublevelProbe& probe, const std::vector<double>& levels) {
  if (!std::is_sorted(levels.begin(), levels.end())) throw std::invalid_argument("sweep levels must be ascending");
  LevelSweep sweep;
  sweep.levels = levels;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    sweep.counts.push_back(probe.components(levels[i]));
    if (i > 0 && sweep.counts[i] != sweep.counts[i - 1]) sweep.change_levels.push_back(levels[i]);
  }
  return sweep;
}

LevelSweep sweep_levels(const Problem& p, const GridSpec& grid, const std::vector<double>& levels) {
  return sweep_levels(SublevelProbe(p, grid), levels);
}

CriticalLevelReport critical_level_report(const LevelSweep& sweep, const std::vector<double>& stationary_values) {
  CriticalLevelReport report;
  for (std::size_t i = 1; i < sweep.levels.size(); ++i) {
    if (sweep.counts[i] == sweep.counts[i - 1]) continue;
    LevelChange c;
    c.from_level = sweep.levels[i - 1];
    c.to_level = sweep.levels[i];
    c.from_count = sweep.counts[i - 1];
    c.to_count = sweep.counts[i];
    const double step = c.to_level - c.from_level;
    double best = std::numeric_limits<double>::infinity();
    for (double v : stationary_values) {
      const double gap = v < c.from_level ? c.from_level - v : (v > c.to_level ? v - c.to_level : 0.0);
      if (gap < best) {
        best = gap;
        c.nearest_value = v;
      }
    }
    c.gap = c.nearest_value ? best : std::numeric_limits<double>::infinity();
    c.bracketed = c.nearest_value.has_value() && c.gap <= step;
    if (!c.bracketed) report.consistent = false;
    report.changes.push_back(c);
  }
  return report;
}

MountainPassReport mountain_pass_check(const std::vector<Classification>& classified,
                                       const MountainPassHypotheses& hypotheses) {
  MountainPassReport report;
  report.hypotheses = hypotheses;
  std::vector<double> values;
  for (const auto& c : classified) {
    if (!c.nd.nondegenerate()) {
      throw DegeneracyError("mountain_pass_check: a stationary point is degenerate at f = " +
                            std::to_string(c.objective));
    }
    if (c.index.w == 0) ++report.r;
    if (c.index.w == 1) ++report.r_s;
    values.push_back(c.objective);
  }
  report.holds = report.r_s >= report.r - 1;
  std::sort(values.begin(), values.end());
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double scale = std::max(1.0, std::abs(values[i]));
    if (values[i] - values[i - 1] <= 1e-9 * scale &&
        (report.tied_values.empty() || report.tied_values.back() != values[i - 1])) {
      report.tied_values.push_back(values[i - 1]);
    }
  }
  return report;
}

}  // namespace mpsc
