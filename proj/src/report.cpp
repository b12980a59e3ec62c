#include "mpsc/report.hpp"

namespace mpsc::report {

namespace {

Json one_based(const std::vector<int>& v) {
  Json out = Json::array();
  for (int i : v) out.push_back(i + 1);
  return out;
}

}  // namespace

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json problem_json(const Problem& p) {
  const auto& names = p.variable_names();
  Json j;
  j["variables"] = names;
  j["objective"] = to_string(p.objective(), names);
  j["eq"] = Json::array();
  for (const auto& e : p.equalities()) j["eq"].push_back(to_string(e, names));
  j["ineq"] = Json::array();
  for (const auto& e : p.inequalities()) j["ineq"].push_back(to_string(e, names));
  j["switch"] = Json::array();
  for (const auto& s : p.switches()) {
    j["switch"].push_back({{"F1", to_string(s.first, names)}, {"F2", to_string(s.second, names)}});
  }
  return j;
}

Json tolerance_json(const ToleranceConfig& tol) {
  Json j = Json::object();
  for (const auto& [k, v] : tol.as_map()) j[k] = v;
  return j;
}

Json box_json(const Box& box) { return {{"lo", vector_json(box.lo)}, {"hi", vector_json(box.hi)}}; }

Json multipliers_json(const Multipliers& m) {
  return {{"lambda", vector_json(m.lambda)},
          {"mu", vector_json(m.mu)},
          {"sigma1", vector_json(m.sigma1)},
          {"sigma2", vector_json(m.sigma2)},
          {"unique", m.unique}};
}

Json index_sets_json(const IndexSets& idx) {
  return {{"J0", one_based(idx.J0)},
          {"alpha", one_based(idx.alpha)},
          {"beta", one_based(idx.beta)},
          {"gamma", one_based(idx.gamma)}};
}

Json nd_json(const NDReport& nd) {
  return {{"ND1", nd.nd1},
          {"ND2", nd.nd2},
          {"ND3", nd.nd3},
          {"ND4", nd.nd4},
          {"nondegenerate", nd.nondegenerate()},
          {"licq_rank", nd.licq_rank},
          {"licq_rows", nd.licq_rows},
          {"ND2_failures", one_based(nd.nd2_failures)},
          {"ND3_failures", one_based(nd.nd3_failures)},
          {"restricted_inertia",
           {{"negative", nd.restricted_inertia.n_neg},
            {"zero", nd.restricted_inertia.n_zero},
            {"positive", nd.restricted_inertia.n_pos}}}};
}

Json windex_json(const WIndex& w) {
  return {{"QI", w.qi}, {"BI", w.bi}, {"w_index", w.w}, {"tangent_dim", w.tangent_dim}, {"degenerate", w.degenerate}};
}

Json stability_json(const std::optional<StabilityVerdict>& v) {
  if (!v) return {{"status", "out of theorem scope (LICQ fails)"}};
  Json subsets = Json::array();
  for (const auto& s : v->subset_results) {
    subsets.push_back({{"J_star", one_based(s.jstar)}, {"dimension", s.dimension}, {"det_sign", s.det_sign}});
  }
  return {{"status", "evaluated"},
          {"strongly_stable", v->strongly_stable},
          {"ND3", v->nd3_holds},
          {"J_plus", one_based(v->j_plus)},
          {"failure_reason", to_string(v->failure_reason)},
          {"subsets", subsets}};
}

Json point_json(const WStationaryPoint& pt, const Classification& c) {
  return {{"x", vector_json(pt.x)},
          {"f", c.objective},
          {"residual", pt.residual},
          {"licq", pt.licq},
          {"multipliers", multipliers_json(pt.mult)},
          {"index_sets", index_sets_json(pt.idx)},
          {"nondegeneracy", nd_json(c.nd)},
          {"index", windex_json(c.index)},
          {"classification", {{"kind", to_string(c.kind)}, {"local_minimizer", c.is_local_minimizer}}},
          {"stability", stability_json(c.stability)}};
}

Json path_json(const ContinuationPath& path) {
  Json samples = Json::array();
  for (const auto& s : path.samples) {
    samples.push_back({{"t", s.t}, {"x", vector_json(s.x)}, {"multipliers", multipliers_json(s.mult)},
                       {"residual", s.kkt_residual}});
  }
  Json j = {{"samples", samples},
            {"limit", vector_json(path.limit)},
            {"final_x", vector_json(path.final_x)},
            {"final_multiplier_norm", path.final_multiplier_norm},
            {"lost", path.lost},
            {"message", path.message}};
  if (path.matched_index) {
    j["matched_point"] = *path.matched_index + 1;
    j["match_distance"] = path.match_distance;
  } else {
    j["matched_point"] = nullptr;
    j["match_distance"] = nullptr;
  }
  return j;
}

Json sweep_json(const LevelSweep& sweep, const CriticalLevelReport& critical) {
  Json changes = Json::array();
  for (const auto& c : critical.changes) {
    Json e = {{"from_level", c.from_level}, {"to_level", c.to_level}, {"from_count", c.from_count},
              {"to_count", c.to_count}, {"bracketed", c.bracketed}};
    e["nearest_stationary_value"] = c.nearest_value ? Json(*c.nearest_value) : Json(nullptr);
    e["gap"] = c.nearest_value ? Json(c.gap) : Json(nullptr);
    changes.push_back(e);
  }
  return {{"levels", sweep.levels},
          {"counts", sweep.counts},
          {"change_levels", sweep.change_levels},
          {"critical_levels", {{"changes", changes}, {"status", critical.consistent ? "CONSISTENT" : "VIOLATION"}}}};
}

Json mountain_pass_json(const MountainPassReport& mp) {
  Json j = {{"r", mp.r},
            {"r_s", mp.r_s},
            {"holds", mp.holds},
            {"hypotheses", {{"compact", mp.hypotheses.compact}, {"connected", mp.hypotheses.connected}}},
            {"tied_values", mp.tied_values}};
  return j;
}

Json envelope(const std::string& command, const Problem& p, const ToleranceConfig& tol) {
  return {{"version", kVersion}, {"command", command}, {"problem", problem_json(p)}, {"tolerances", tolerance_json(tol)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mpsc::report
