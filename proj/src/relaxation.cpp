#include "mpsc/relaxation.hpp"

#include <cmath>
#include <limits>

namespace mpsc {

RelaxedProblem relax(const Problem& p, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("relax: relaxation parameter must be positive");
  std::vector<Expr> ineq = p.inequalities();
  const Expr te = Expr::constant(t);
  for (const auto& s : p.switches()) {
    const Expr prod = s.first * s.second;
    ineq.push_back(te - prod);
    ineq.push_back(te + prod);
  }
  Problem nlp(p.variable_names(), p.objective(), p.equalities(), std::move(ineq), {});
  return RelaxedProblem{p, t, std::move(nlp)};
}

std::vector<WStationaryPoint> kkt_points_relaxed(const RelaxedProblem& rp, const Box& box,
                                                 const StationarityConfig& cfg) {
  return find_stationary_points(rp.nlp, box, cfg).points;
}

namespace {

bool valid_kkt(const Problem& nlp, const WStationaryPoint& pt, const ToleranceConfig& tol) {
  return pt.x.allFinite() && is_w_stationary(nlp, pt.x, pt.mult, tol);
}

BranchPattern pattern_from_active(const Problem& nlp, const Vector& x, const ToleranceConfig& tol) {
  BranchPattern pat;
  pat.inequalities.assign(nlp.num_inequalities(), InequalityBranch::Inactive);
  for (int j : active_sets(nlp, x, tol).J0) pat.inequalities[j] = InequalityBranch::Active;
  return pat;
}

// Secant predictor in sqrt(t): exact for the x ~ sqrt(t) branches of the relaxation.
Vector predict(const std::vector<PathSample>& samples, double next_t) {
  const PathSample& last = samples.back();
  if (samples.size() < 2) return last.x;
  const PathSample& before = samples[samples.size() - 2];
  const double ds = std::sqrt(last.t) - std::sqrt(before.t);
  if (ds == 0.0) return last.x;
  return last.x + (last.x - before.x) * ((std::sqrt(next_t) - std::sqrt(last.t)) / ds);
}

// Multipliers scale like 1/sqrt(t) on some branches, so a warm start alone can
// stall the damped Newton iteration; several starts are tried and the valid
// solution closest to the predicted point wins.
std::optional<WStationaryPoint> step_to(const Problem& nlp, const BranchPattern& pattern,
                                        const std::vector<PathSample>& samples, const Vector& predicted,
                                        const StationarityConfig& cfg) {
  const PathSample& prev = samples.back();
  const Multipliers cold = Multipliers::zeros(nlp);
  const std::pair<const Vector*, const Multipliers*> starts[] = {
      {&predicted, &cold}, {&prev.x, &prev.mult}, {&prev.x, &cold}};
  std::optional<WStationaryPoint> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& [x, m] : starts) {
    NewtonOutcome out = newton_solve_branch(nlp, pattern, *x, *m, cfg);
    if (!out.candidate || !valid_kkt(nlp, *out.candidate, cfg.tol)) continue;
    const double d = (out.candidate->x - predicted).norm();
    if (d < best_dist) {
      best_dist = d;
      best = std::move(out.candidate);
    }
  }
  return best;
}

// Re-detection: every activity pattern; the valid solution nearest to the
// predicted point wins.
std::optional<WStationaryPoint> redetect(const Problem& nlp, const std::vector<PathSample>& samples,
                                         const Vector& predicted, const StationarityConfig& cfg) {
  std::optional<WStationaryPoint> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& pattern : enumerate_branches(nlp, cfg.pattern_cap)) {
    auto cand = step_to(nlp, pattern, samples, predicted, cfg);
    if (!cand) continue;
    const double d = (cand->x - predicted).norm();
    if (d < best_dist) {
      best_dist = d;
      best = std::move(cand);
    }
  }
  return best;
}

double max_abs(const Multipliers& m) {
  double v = 0.0;
  for (const Vector* vec : {&m.lambda, &m.mu, &m.sigma1, &m.sigma2}) {
    if (vec->size() > 0) v = std::max(v, vec->cwiseAbs().maxCoeff());
  }
  return v;
}

}  // namespace

ContinuationPath continue_path(const Problem& p, const WStationaryPoint& seed, double t0,
                               const ContinuationOptions& opts, const StationarityConfig& cfg,
                               const std::vector<WStationaryPoint>& stationary) {
  if (!(t0 > 0.0)) throw std::invalid_argument("continue_path: t0 must be positive");
  if (!(opts.rho > 0.0 && opts.rho < 1.0)) throw std::invalid_argument("continue_path: rho must lie in (0, 1)");
  if (!(opts.t_min > 0.0)) throw std::invalid_argument("continue_path: t_min must be positive");

  const RelaxedProblem first = relax(p, t0);
  const double seed_resid = w_residual(first.nlp, seed.x, seed.mult);
  if (!(seed_resid <= cfg.tol.resid)) {
    throw std::invalid_argument("continue_path: seed is not a KKT point of the relaxed problem");
  }

  ContinuationPath path;
  PathSample s0;
  s0.t = t0;
  s0.x = seed.x;
  s0.mult = seed.mult;
  s0.kkt_residual = seed_resid;
  s0.pattern = seed.source_pattern.inequalities.size() == static_cast<std::size_t>(first.nlp.num_inequalities())
                   ? seed.source_pattern
                   : pattern_from_active(first.nlp, seed.x, cfg.tol);
  path.samples.push_back(std::move(s0));

  double t = t0;
  while (true) {
    const double next_t = opts.rho * t;
    if (next_t < opts.t_min * (1.0 - 1e-12)) break;
    const Problem nlp = relax(p, next_t).nlp;
    const Vector predicted = predict(path.samples, next_t);
    auto pt = step_to(nlp, path.samples.back().pattern, path.samples, predicted, cfg);
    if (!pt) pt = redetect(nlp, path.samples, predicted, cfg);
    if (!pt) {
      path.lost = true;
      path.message = "path lost at t = " + std::to_string(next_t) + " after active-set re-detection";
      break;
    }
    PathSample s;
    s.t = next_t;
    s.x = pt->x;
    s.mult = pt->mult;
    s.kkt_residual = w_residual(nlp, pt->x, pt->mult);
    s.pattern = pt->source_pattern;
    path.samples.push_back(std::move(s));
    t = next_t;
  }

  const PathSample& last = path.samples.back();
  path.final_x = last.x;
  path.final_multiplier_norm = max_abs(last.mult);
  path.limit = last.x;
  if (path.samples.size() >= 2) {
    const PathSample& before = path.samples[path.samples.size() - 2];
    const double s1 = std::sqrt(before.t);
    const double s2 = std::sqrt(last.t);
    path.limit = (last.x * s1 - before.x * s2) / (s1 - s2);
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < stationary.size(); ++i) {
    const double d = (stationary[i].x - path.limit).norm();
    if (d <= cfg.tol.match && d < best) {
      best = d;
      path.matched_index = i;
      path.match_distance = d;
    }
  }
  return path;
}

}  // namespace mpsc
