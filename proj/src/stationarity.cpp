#include "mpsc/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mpsc/parallel.hpp"

namespace mpsc {

Multipliers Multipliers::zeros(const Problem& p) {
  Multipliers m;
  m.lambda = Vector::Zero(p.num_equalities());
  m.mu = Vector::Zero(p.num_inequalities());
  m.sigma1 = Vector::Zero(p.num_switches());
  m.sigma2 = Vector::Zero(p.num_switches());
  return m;
}

std::string to_string(const BranchPattern& pattern) {
  std::string s;
  for (auto b : pattern.switches) {
    if (!s.empty()) s += ' ';
    s += b == SwitchBranch::S1 ? "S1" : b == SwitchBranch::S2 ? "S2" : "BOTH";
  }
  for (auto b : pattern.inequalities) {
    if (!s.empty()) s += ' ';
    s += b == InequalityBranch::Active ? "A" : "I";
  }
  return s;
}

Box Box::uniform(int n, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("box requires lo < hi");
  return Box{Vector::Constant(n, lo), Vector::Constant(n, hi)};
}

bool Box::contains(const Vector& x, double inflate_fraction) const {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double pad = inflate_fraction * (hi[i] - lo[i]);
    if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
  }
  return true;
}

IndexSets active_sets(const Problem& p, const Vector& x, const ToleranceConfig& tol) {
  IndexSets idx;
  for (int j = 0; j < p.num_inequalities(); ++j) {
    if (std::abs(eval_value(p.inequalities()[j], x)) <= tol.active) idx.J0.push_back(j);
  }
  for (int m = 0; m < p.num_switches(); ++m) {
    const bool z1 = std::abs(eval_value(p.switches()[m].first, x)) <= tol.active;
    const bool z2 = std::abs(eval_value(p.switches()[m].second, x)) <= tol.active;
    if (z1 && z2)
      idx.beta.push_back(m);
    else if (z1)
      idx.alpha.push_back(m);
    else if (z2)
      idx.gamma.push_back(m);
  }
  return idx;
}

Matrix licq_matrix(const Problem& p, const Vector& x, const IndexSets& idx) {
  const int n = p.dimension();
  std::vector<Vector> rows;
  for (const auto& h : p.equalities()) rows.push_back(eval_gradient(h, x));
  for (int m : idx.alpha) rows.push_back(eval_gradient(p.switches()[m].first, x));
  for (int m : idx.gamma) rows.push_back(eval_gradient(p.switches()[m].second, x));
  for (int j : idx.J0) rows.push_back(eval_gradient(p.inequalities()[j], x));
  for (int m : idx.beta) {
    rows.push_back(eval_gradient(p.switches()[m].first, x));
    rows.push_back(eval_gradient(p.switches()[m].second, x));
  }
  Matrix g(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r) g.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return g;
}

double infeasibility(const Problem& p, const Vector& x) {
  double v = 0.0;
  for (const auto& h : p.equalities()) v = std::max(v, std::abs(eval_value(h, x)));
  for (const auto& g : p.inequalities()) v = std::max(v, -eval_value(g, x));
  for (const auto& s : p.switches()) {
    v = std::max(v, std::abs(eval_value(s.first, x) * eval_value(s.second, x)));
  }
  return v;
}

LicqReport check_licq(const Problem& p, const Vector& x, const ToleranceConfig& tol) {
  if (infeasibility(p, x) > tol.feas) throw InfeasiblePointError("check_licq: point is infeasible");
  const Matrix g = licq_matrix(p, x, active_sets(p, x, tol));
  LicqReport report;
  report.rows = static_cast<int>(g.rows());
  report.rank = rank(g, tol);
  report.holds = report.rank == report.rows;
  return report;
}

double w_residual(const Problem& p, const Vector& x, const Multipliers& m) {
  Vector stat = eval_gradient(p.objective(), x);
  double r = 0.0;
  for (int i = 0; i < p.num_equalities(); ++i) {
    const Expr& h = p.equalities()[i];
    stat -= m.lambda[i] * eval_gradient(h, x);
    r = std::max(r, std::abs(eval_value(h, x)));
  }
  for (int j = 0; j < p.num_inequalities(); ++j) {
    const Expr& g = p.inequalities()[j];
    const double gv = eval_value(g, x);
    if (m.mu[j] != 0.0) stat -= m.mu[j] * eval_gradient(g, x);
    r = std::max({r, -gv, std::abs(m.mu[j] * gv)});
  }
  for (int k = 0; k < p.num_switches(); ++k) {
    const auto& s = p.switches()[k];
    const double f1 = eval_value(s.first, x);
    const double f2 = eval_value(s.second, x);
    if (m.sigma1[k] != 0.0) stat -= m.sigma1[k] * eval_gradient(s.first, x);
    if (m.sigma2[k] != 0.0) stat -= m.sigma2[k] * eval_gradient(s.second, x);
    r = std::max({r, std::abs(f1 * f2), std::abs(m.sigma1[k] * f1), std::abs(m.sigma2[k] * f2)});
  }
  if (stat.size() > 0) r = std::max(r, stat.cwiseAbs().maxCoeff());
  return r;
}

double min_inequality_multiplier(const Multipliers& m) {
  return m.mu.size() == 0 ? 0.0 : m.mu.minCoeff();
}

bool is_w_stationary(const Problem& p, const Vector& x, const Multipliers& m, const ToleranceConfig& tol) {
  return w_residual(p, x, m) <= tol.resid && min_inequality_multiplier(m) >= -tol.sign;
}

namespace {

// Scatter a coefficient vector ordered like licq_matrix rows into multiplier slots.
Multipliers scatter(const Problem& p, const IndexSets& idx, const Vector& c) {
  Multipliers m = Multipliers::zeros(p);
  Eigen::Index r = 0;
  for (int i = 0; i < p.num_equalities(); ++i) m.lambda[i] = c[r++];
  for (int k : idx.alpha) m.sigma1[k] = c[r++];
  for (int k : idx.gamma) m.sigma2[k] = c[r++];
  for (int j : idx.J0) m.mu[j] = c[r++];
  for (int k : idx.beta) {
    m.sigma1[k] = c[r++];
    m.sigma2[k] = c[r++];
  }
  return m;
}

}  // namespace

Multipliers recover_multipliers(const Problem& p, const Vector& x, const ToleranceConfig& tol) {
  const LicqReport licq = check_licq(p, x, tol);
  const IndexSets idx = active_sets(p, x, tol);
  const Matrix gt = licq_matrix(p, x, idx).transpose();
  const Vector df = eval_gradient(p.objective(), x);
  Vector c = licq.holds ? solve_linear(gt, df, tol) : solve_min_norm(gt, df, tol);
  const double stat = (gt * c - df).cwiseAbs().maxCoeff();
  if (!(stat <= tol.resid)) {
    throw NotStationaryError("recover_multipliers: stationarity residual " + std::to_string(stat) +
                             " exceeds tolerance");
  }
  Multipliers m = scatter(p, idx, c);
  m.unique = licq.holds;
  return m;
}

std::vector<BranchPattern> enumerate_branches(const Problem& p, std::size_t cap) {
  const int k = p.num_switches();
  const int nj = p.num_inequalities();
  std::size_t total = 1;
  for (int i = 0; i < k + nj; ++i) {
    total *= (i < k) ? 3 : 2;
    if (total > cap) {
      throw CombinatorialExplosionError("branch enumeration needs 3^" + std::to_string(k) + " * 2^" +
                                        std::to_string(nj) + " patterns, exceeding the pattern cap of " +
                                        std::to_string(cap));
    }
  }
  std::vector<BranchPattern> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    BranchPattern pat;
    pat.switches.resize(k);
    pat.inequalities.resize(nj);
    std::size_t rest = code;
    // least significant digit is the last inequality
    for (int j = nj - 1; j >= 0; --j) {
      pat.inequalities[j] = (rest % 2) ? InequalityBranch::Active : InequalityBranch::Inactive;
      rest /= 2;
    }
    for (int m = k - 1; m >= 0; --m) {
      pat.switches[m] = static_cast<SwitchBranch>(rest % 3);
      rest /= 3;
    }
    out.push_back(std::move(pat));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Newton on one branch pattern

namespace {

// Square system for a fixed pattern. Unknowns: x, lambda, mu (active j),
// sigma (per switch: S1 -> sigma1, S2 -> sigma2, BOTH -> sigma1, sigma2).
class BranchSystem {
 public:
  BranchSystem(const Problem& p, const BranchPattern& pattern) : p_(p) {
    for (int j = 0; j < p.num_inequalities(); ++j) {
      if (pattern.inequalities[j] == InequalityBranch::Active) active_.push_back(j);
    }
    for (int m = 0; m < p.num_switches(); ++m) {
      const SwitchBranch b = pattern.switches[m];
      if (b != SwitchBranch::S2) switch_terms_.push_back({m, true});
      if (b != SwitchBranch::S1) switch_terms_.push_back({m, false});
    }
    n_ = p.dimension();
    size_ = n_ + p.num_equalities() + static_cast<int>(active_.size()) + static_cast<int>(switch_terms_.size());
  }

  int size() const { return size_; }

  Vector pack(const Vector& x, const Multipliers& m) const {
    Vector z(size_);
    z.head(n_) = x;
    int r = n_;
    for (int i = 0; i < p_.num_equalities(); ++i) z[r++] = m.lambda[i];
    for (int j : active_) z[r++] = m.mu[j];
    for (const auto& t : switch_terms_) z[r++] = t.first_function ? m.sigma1[t.index] : m.sigma2[t.index];
    return z;
  }

  Multipliers unpack(const Vector& z) const {
    Multipliers m = Multipliers::zeros(p_);
    int r = n_;
    for (int i = 0; i < p_.num_equalities(); ++i) m.lambda[i] = z[r++];
    for (int j : active_) m.mu[j] = z[r++];
    for (const auto& t : switch_terms_) (t.first_function ? m.sigma1 : m.sigma2)[t.index] = z[r++];
    return m;
  }

  /// Residual, and the Jacobian when `jac` is non-null.
  Vector evaluate(const Vector& z, Matrix* jac) const {
    const Vector x = z.head(n_);
    Vector res = Vector::Zero(size_);
    if (jac) jac->setZero(size_, size_);

    // Each constraint term contributes -coef * grad to the stationarity rows,
    // -coef * Hessian to the Lagrangian Hessian, and one equation row.
    int unknown = n_;
    int row = n_;
    Matrix hess;
    const auto objective = jac ? eval_jet(p_.objective(), x) : value_and_gradient(p_.objective(), x);
    res.head(n_) = objective.gradient;
    if (jac) hess = objective.hessian;

    auto add_term = [&](const Expr& e) {
      const double coef = z[unknown];
      const Jet jet = jac ? eval_jet(e, x) : value_and_gradient(e, x);
      res.head(n_) -= coef * jet.gradient;
      res[row] = jet.value;
      if (jac) {
        hess -= coef * jet.hessian;
        jac->block(0, unknown, n_, 1) = -jet.gradient;
        jac->block(row, 0, 1, n_) = jet.gradient.transpose();
      }
      ++unknown;
      ++row;
    };
    for (const auto& h : p_.equalities()) add_term(h);
    for (int j : active_) add_term(p_.inequalities()[j]);
    for (const auto& t : switch_terms_) {
      const auto& s = p_.switches()[t.index];
      add_term(t.first_function ? s.first : s.second);
    }
    if (jac) jac->topLeftCorner(n_, n_) = hess;
    return res;
  }

 private:
  struct SwitchTerm {
    int index;
    bool first_function;
  };

  static Jet value_and_gradient(const Expr& e, const Vector& x) {
    Jet j;
    j.value = eval_value(e, x);
    j.gradient = eval_gradient(e, x);
    return j;
  }

  const Problem& p_;
  std::vector<int> active_;
  std::vector<SwitchTerm> switch_terms_;
  int n_ = 0;
  int size_ = 0;
};

}  // namespace

NewtonOutcome newton_solve_branch(const Problem& p, const BranchPattern& pattern, const Vector& start,
                                  const StationarityConfig& cfg) {
  return newton_solve_branch(p, pattern, start, Multipliers::zeros(p), cfg);
}

NewtonOutcome newton_solve_branch(const Problem& p, const BranchPattern& pattern, const Vector& start,
                                  const Multipliers& start_mult, const StationarityConfig& cfg) {
  if (start.size() != p.dimension()) throw std::invalid_argument("newton_solve_branch: start dimension mismatch");
  if (static_cast<int>(pattern.switches.size()) != p.num_switches() ||
      static_cast<int>(pattern.inequalities.size()) != p.num_inequalities()) {
    throw std::invalid_argument("newton_solve_branch: pattern does not match problem");
  }
  NewtonOutcome out;
  const BranchSystem sys(p, pattern);
  Vector z = sys.pack(start, start_mult);
  Matrix jac;
  Vector res;
  try {
    res = sys.evaluate(z, &jac);
  } catch (const DomainError&) {
    out.domain_error = true;
    return out;
  }

  bool converged = false;
  for (int iter = 0; iter <= cfg.max_iter; ++iter) {
    out.iterations = iter;
    if (res.cwiseAbs().maxCoeff() <= cfg.tol.resid) {
      converged = true;
      break;
    }
    if (iter == cfg.max_iter) break;
    // Row then column equilibration: near bi-active limits the constraint rows
    // and multiplier columns shrink and would trip the relative rank test.
    // The row scaling also defines the merit function of the line search.
    auto inverse_norms = [](const Vector& norms) {
      Vector inv(norms.size());
      for (Eigen::Index i = 0; i < norms.size(); ++i) inv[i] = norms[i] > 0.0 ? 1.0 / norms[i] : 1.0;
      return inv;
    };
    const Vector row_scale = inverse_norms(jac.rowwise().norm());
    const Matrix scaled_rows = row_scale.asDiagonal() * jac;
    const Vector col_scale = inverse_norms(scaled_rows.colwise().norm().transpose());
    Vector step;
    try {
      step = col_scale.asDiagonal() *
             solve_linear(scaled_rows * col_scale.asDiagonal(), -(row_scale.asDiagonal() * res), cfg.tol);
    } catch (const SingularSystemError&) {
      out.singular = true;
      return out;
    }
    const double norm0 = (row_scale.asDiagonal() * res).norm();
    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, alpha *= 0.5) {
      const Vector trial = z + alpha * step;
      Vector trial_res;
      try {
        trial_res = sys.evaluate(trial, nullptr);
      } catch (const DomainError&) {
        continue;
      }
      if (trial_res.allFinite() && (row_scale.asDiagonal() * trial_res).norm() <= (1.0 - 1e-4 * alpha) * norm0) {
        z = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) return out;
    try {
      res = sys.evaluate(z, &jac);
    } catch (const DomainError&) {
      out.domain_error = true;
      return out;
    }
  }
  if (!converged) return out;

  WStationaryPoint pt;
  pt.x = z.head(p.dimension());
  pt.mult = sys.unpack(z);
  pt.source_pattern = pattern;
  try {
    pt.residual = w_residual(p, pt.x, pt.mult);
  } catch (const DomainError&) {
    out.domain_error = true;
    return out;
  }
  out.candidate = std::move(pt);
  return out;
}

// ---------------------------------------------------------------------------
// Multi-start search

namespace {

std::vector<Vector> start_grid(const Box& box, const StationarityConfig& cfg) {
  const int n = static_cast<int>(box.lo.size());
  const int per_axis = std::max(1, cfg.starts_per_axis);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= per_axis;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::vector<Vector> starts;
  starts.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    Vector x(n);
    std::size_t rest = code;
    for (int i = n - 1; i >= 0; --i) {
      const int k = static_cast<int>(rest % per_axis);
      rest /= per_axis;
      const double width = box.hi[i] - box.lo[i];
      const double spacing = per_axis > 1 ? width / (per_axis - 1) : width;
      double t = per_axis > 1 ? box.lo[i] + k * spacing : 0.5 * (box.lo[i] + box.hi[i]);
      if (cfg.seed != 0) t += jitter(rng) * spacing;
      x[i] = t;
    }
    starts.push_back(std::move(x));
  }
  return starts;
}

bool lexicographic_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

void finalize_point(const Problem& p, WStationaryPoint& pt, const ToleranceConfig& tol) {
  pt.idx = active_sets(p, pt.x, tol);
  const Matrix g = licq_matrix(p, pt.x, pt.idx);
  pt.licq = rank(g, tol) == g.rows();
  try {
    Multipliers recovered = recover_multipliers(p, pt.x, tol);
    if (is_w_stationary(p, pt.x, recovered, tol)) {
      pt.mult = std::move(recovered);
    } else {
      pt.mult.unique = pt.licq;
    }
  } catch (const NotStationaryError&) {
    pt.mult.unique = pt.licq;
  } catch (const SingularSystemError&) {
    pt.mult.unique = false;
  } catch (const InfeasiblePointError&) {
    pt.mult.unique = pt.licq;
  }
  pt.residual = w_residual(p, pt.x, pt.mult);
}

}  // namespace

StationarySearch find_stationary_points(const Problem& p, const Box& box, const StationarityConfig& cfg) {
  if (box.lo.size() != p.dimension() || box.hi.size() != p.dimension()) {
    throw std::invalid_argument("find_stationary_points: box dimension mismatch");
  }
  for (int i = 0; i < p.dimension(); ++i) {
    if (!(box.lo[i] <= box.hi[i])) throw std::invalid_argument("find_stationary_points: empty box");
  }
  const std::vector<BranchPattern> patterns = enumerate_branches(p, cfg.pattern_cap);
  const std::vector<Vector> starts = start_grid(box, cfg);
  const std::size_t tasks = patterns.size() * starts.size();

  std::vector<NewtonOutcome> outcomes(tasks);
  parallel_for(tasks, cfg.threads, [&](std::size_t t) {
    outcomes[t] = newton_solve_branch(p, patterns[t / starts.size()], starts[t % starts.size()], cfg);
  });

  const ToleranceConfig& tol = cfg.tol;
  StationarySearch result;
  result.solves = tasks;
  auto near_any = [&](const std::vector<WStationaryPoint>& pts, const Vector& x) {
    return std::any_of(pts.begin(), pts.end(),
                       [&](const WStationaryPoint& q) { return (q.x - x).norm() <= tol.dedup; });
  };
  for (auto& outcome : outcomes) {
    if (outcome.singular) ++result.singular_solves;
    if (!outcome.candidate) continue;
    WStationaryPoint& c = *outcome.candidate;
    if (!c.x.allFinite() || !box.contains(c.x, 0.1)) continue;
    if (!(c.residual <= tol.resid)) continue;
    if (min_inequality_multiplier(c.mult) < -tol.sign) {
      if (!near_any(result.rejected_sign, c.x)) {
        c.idx = active_sets(p, c.x, tol);
        result.rejected_sign.push_back(std::move(c));
      }
      continue;
    }
    if (near_any(result.points, c.x)) continue;
    result.points.push_back(std::move(c));
  }

  for (auto& pt : result.points) finalize_point(p, pt, tol);
  // a recovered multiplier may still fail the final check; keep only verified points
  std::erase_if(result.points, [&](const WStationaryPoint& pt) { return !is_w_stationary(p, pt.x, pt.mult, tol); });
  auto by_x = [](const WStationaryPoint& a, const WStationaryPoint& b) { return lexicographic_less(a.x, b.x); };
  std::sort(result.points.begin(), result.points.end(), by_x);
  std::sort(result.rejected_sign.begin(), result.rejected_sign.end(), by_x);
  return result;
}

}  // namespace mpsc
