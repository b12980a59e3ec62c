// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "mpsc/relaxation.hpp"
#include "mpsc/topology.hpp"
#include "support/properties.hpp"

using namespace mpsc;
using namespace mpsc::testing;

namespace {

struct Criterion {
  std::string name;
  double budget_s;
  std::function<std::string()> body;  // empty string on success, else the reason
};

Problem load(const std::string& name) {
  std::ifstream in(std::string(MPSC_PROBLEM_DIR) + "/" + name);
  std::stringstream s;
  s << in.rdbuf();
  return parse_problem(s.str());
}

Vector pt(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

const Box kBox = Box::uniform(2, -2, 2);

std::string fail(const std::string& why) { return why.empty() ? "unspecified" : why; }

std::string cross() {
  const Problem p = load("cross.mpsc");
  const auto pts = find_stationary_points(p, kBox).points;
  if (pts.size() != 1) return "expected 1 point, got " + std::to_string(pts.size());
  const auto& w = pts[0];
  if (w.x.cwiseAbs().maxCoeff() > 1e-8) return "point is not the origin";
  if (std::abs(w.mult.sigma1[0] - 1) > 1e-8 || std::abs(w.mult.sigma2[0] - 1) > 1e-8) return "sigma != (1, 1)";
  const Classification c = classify_point(p, w);
  if (c.index.bi != 1 || c.index.qi != 0 || c.index.w != 1) return "index mismatch";
  if (!c.nd.nondegenerate()) return "reported degenerate";
  return "";
}

std::string scholtes() {
  const Problem p = load("scholtes.mpsc");
  const auto pts = find_stationary_points(p, kBox).points;
  if (pts.size() != 3) return "expected 3 points, got " + std::to_string(pts.size());
  std::vector<Classification> cls;
  for (const auto& w : pts) cls.push_back(classify_point(p, w));
  const int o = find_point(pts, pt(0, 0), 1e-8);
  const int a = find_point(pts, pt(1, 0), 1e-8);
  const int b = find_point(pts, pt(0, 1), 1e-8);
  if (o < 0 || a < 0 || b < 0) return "points differ from {(0,0), (1,0), (0,1)}";
  if (cls[o].kind != PointKind::Saddle || cls[o].index.qi != 0 || cls[o].index.bi != 1) return "origin is not a BI=1 saddle";
  for (int i : {a, b})
    if (cls[i].kind != PointKind::Minimizer || cls[i].index.w != 0) return "axis point is not a minimizer";
  const MountainPassReport mp = mountain_pass_check(cls, {true, true});
  if (mp.r != 2 || mp.r_s != 1 || !mp.holds) return "mountain pass counts differ";
  return "";
}

std::string continuation() {
  const Problem p = load("scholtes.mpsc");
  const StationarityConfig cfg;
  for (double t : {0.1, 0.05, 0.025, 0.01}) {
    const auto pts = kkt_points_relaxed(relax(p, t), Box::uniform(2, -1, 2), cfg);
    const double r = std::sqrt(1 - 4 * t);
    const std::vector<Vector> expected{pt(std::sqrt(t), std::sqrt(t)), pt((1 + r) / 2, (1 - r) / 2),
                                       pt((1 - r) / 2, (1 + r) / 2)};
    if (pts.size() != expected.size()) return "relaxed point count differs at t = " + std::to_string(t);
    for (const Vector& e : expected) {
      const int i = find_point(pts, e, 1e-6);
      if (i < 0 || (pts[i].x - e).cwiseAbs().maxCoeff() > 1e-8) return "closed form missed at t = " + std::to_string(t);
    }
  }
  const auto stationary = find_stationary_points(p, kBox, cfg).points;
  const auto seeds = kkt_points_relaxed(relax(p, 0.1), kBox, cfg);
  if (seeds.size() != 3) return "expected 3 seeds";
  std::vector<Vector> targets{pt(0, 0), pt(1, 0), pt(0, 1)};
  for (const auto& seed : seeds) {
    const ContinuationPath path = continue_path(p, seed, 0.1, {0.5, 1e-10}, cfg, stationary);
    if (path.lost) return "path lost: " + path.message;
    bool hit = false;
    for (auto it = targets.begin(); it != targets.end(); ++it) {
      if ((path.limit - *it).norm() <= 1e-6) {
        targets.erase(it);
        hit = true;
        break;
      }
    }
    if (!hit) return "limit not within 1e-6 of an unclaimed target";
  }
  return "";
}

std::string instability() {
  for (const auto& [name, failures] : {std::pair<const char*, std::size_t>{"instability1.mpsc", 1},
                                       {"instability2.mpsc", 1}}) {
    const Problem p = load(name);
    const auto pts = find_stationary_points(p, kBox).points;
    const int o = find_point(pts, pt(0, 0), 1e-8);
    if (o < 0) return std::string(name) + ": origin not found";
    const Classification c = classify_point(p, pts[o]);
    if (!c.stability || c.stability->strongly_stable) return std::string(name) + ": not reported unstable";
    if (c.stability->failure_reason != FailureReason::Nd3Fails) return std::string(name) + ": reason is not ND3_FAILS";
    if (c.nd.nd3_failures.size() != failures) return std::string(name) + ": ND3 failure count";
  }
  // Both multipliers vanish in the first example, only sigma2 in the second.
  const auto m1 = find_stationary_points(load("instability1.mpsc"), kBox).points;
  const auto m2 = find_stationary_points(load("instability2.mpsc"), kBox).points;
  const auto& s1 = m1[find_point(m1, pt(0, 0), 1e-8)].mult;
  const auto& s2 = m2[find_point(m2, pt(0, 0), 1e-8)].mult;
  if (std::abs(s1.sigma1[0]) > 1e-8 || std::abs(s1.sigma2[0]) > 1e-8) return "instability I multipliers";
  if (std::abs(s2.sigma1[0] - 1) > 1e-8 || std::abs(s2.sigma2[0]) > 1e-8) return "instability II multipliers";
  return "";
}

std::string witness() {
  const Problem p = load("ineq_witness.mpsc");
  const auto pts = find_stationary_points(p, kBox).points;
  const int o = find_point(pts, pt(0, 0), 1e-8);
  if (pts.size() != 1 || o < 0) return "origin is not the unique point";
  const Classification c = classify_point(p, pts[o]);
  if (c.nd.nd2) return "ND2 reported to hold";
  if (!c.stability || !c.stability->strongly_stable) return "not strongly stable";
  if (c.stability->subset_results.size() != 2) return "expected two subsets";
  for (const auto& s : c.stability->subset_results)
    if (s.det_sign != 1) return "subset determinant sign is not +1";
  return "";
}

std::string level_sets() {
  const Problem cross = load("cross.mpsc");
  const Problem sch = load("scholtes.mpsc");
  const auto grid = [](int res) { return GridSpec{Box::uniform(2, -2, 2), res}; };
  const std::vector<double> cl{-1, 1}, sl{0.5, 1.5, 2.5};
  const auto c401 = sweep_levels(cross, grid(401), cl).counts;
  const auto s401 = sweep_levels(sch, grid(401), sl).counts;
  if (c401 != std::vector<int>{2, 1}) return "cross counts differ";
  if (s401 != std::vector<int>{0, 2, 1}) return "relaxation example counts differ";
  if (sweep_levels(cross, grid(801), cl).counts != c401) return "cross counts change at 801";
  if (sweep_levels(sch, grid(801), sl).counts != s401) return "relaxation example counts change at 801";
  return "";
}

std::string properties() {
  const SuiteReport r = run_property_suite(100, 20261015, suite_config());
  std::string why;
  for (const auto& prop : r.properties) {
    if (prop.checked == 0) why += prop.name + " never checked; ";
    if (!prop.ok()) why += prop.name + ": " + prop.failures.front() + "; ";
  }
  if (r.problems < 100) why += "fewer than 100 problems; ";
  return why;
}

Vector fd_gradient(const Expr& e, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (eval_value(e, a) - eval_value(e, b)) / (2 * h);
  }
  return g;
}

std::string derivatives() {
  Rng rng(4242);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 3;
    const Expr e = random_smooth_expr(rng, n, 1 + trial % 4);
    const Vector x = random_point(rng, n, -1.5, 1.5);
    const Jet jet = eval_jet(e, x);
    Matrix h_fd(n, n);
    for (int i = 0; i < n; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
      Vector a = x, b = x;
      a[i] += h;
      b[i] -= h;
      h_fd.col(i) = (eval_gradient(e, a) - eval_gradient(e, b)) / (2 * h);
    }
    const double gerr = (jet.gradient - fd_gradient(e, x)).norm() / std::max(1.0, jet.gradient.norm());
    const double herr = (jet.hessian - h_fd).norm() / std::max(1.0, jet.hessian.norm());
    if (gerr > 1e-6 || herr > 1e-5) return "trial " + std::to_string(trial) + ": " + to_string(e, default_names(n));
  }
  return "";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"cross example", 1.0, cross},
      {"relaxation example and mountain pass", 2.0, scholtes},
      {"Scholtes closed forms and continuation", 5.0, continuation},
      {"instability examples", 2.0, instability},
      {"stability without nondegeneracy", 1.0, witness},
      {"level-set sweeps", 10.0, level_sets},
      {"random property suite", 60.0, properties},
      {"derivative oracle", 5.0, derivatives},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    std::string why;
    try {
      why = c.body();
    } catch (const std::exception& e) {
      why = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (why.empty() && secs > c.budget_s) why = "over time budget";
    std::printf("%s criterion %zu: %s (%.2f s, budget %.0f s)%s%s\n", why.empty() ? "PASS" : "FAIL", i + 1,
                c.name.c_str(), secs, c.budget_s, why.empty() ? "" : " - ", why.c_str());
    if (!why.empty()) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
