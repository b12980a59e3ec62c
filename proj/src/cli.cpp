#include "mpsc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mpsc/report.hpp"

namespace mpsc {

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string file;
  std::string json_path;
  std::vector<std::string> tol;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::vector<double> box{-2.0, 2.0};
};

struct RelaxArgs {
  double t0 = 0.1;
  double rho = 0.5;
  double tmin = 1e-10;
};

struct LevelArgs {
  int grid = 0;
  std::string levels;
  int auto_levels = 0;
  bool compact = false;
  bool connected = false;
  bool labels = false;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string vec(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += num(v[i]);
  }
  return s + ")";
}

Problem load(const CommonArgs& a) {
  std::ifstream in(a.file);
  if (!in) throw InputError("cannot open problem file '" + a.file + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

StationarityConfig make_config(const CommonArgs& a) {
  StationarityConfig cfg;
  for (const auto& kv : a.tol) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("--tol expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw InputError("--tol value for '" + key + "' is not a number");
    }
    if (!(value >= 0.0) || !std::isfinite(value)) throw InputError("--tol value for '" + key + "' must be >= 0");
    try {
      cfg.tol.set(key, value);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  cfg.threads = a.threads;
  cfg.seed = a.seed;
  return cfg;
}

Box make_box(const CommonArgs& a, int n) {
  if (!(a.box[0] < a.box[1])) throw InputError("--box requires lo < hi");
  return Box::uniform(n, a.box[0], a.box[1]);
}

void write_json(const CommonArgs& a, const report::Json& j, std::ostream& out) {
  if (a.json_path.empty()) return;
  if (a.json_path == "-") {
    out << report::dump(j);
    return;
  }
  std::ofstream f(a.json_path, std::ios::binary);
  if (!f) throw InputError("cannot write JSON report to '" + a.json_path + "'");
  f << report::dump(j);
}

struct Analysis {
  std::vector<WStationaryPoint> points;
  std::vector<Classification> classes;
  StationarySearch search;
};

Analysis analyze_points(const Problem& p, const Box& box, const StationarityConfig& cfg) {
  Analysis a;
  a.search = find_stationary_points(p, box, cfg);
  a.points = a.search.points;
  for (const auto& pt : a.points) a.classes.push_back(classify_point(p, pt, cfg.tol));
  return a;
}

void print_point(std::ostream& out, std::size_t i, const WStationaryPoint& pt, const Classification& c) {
  out << "  [" << i + 1 << "] x = " << vec(pt.x) << "  f = " << num(c.objective) << "\n";
  out << "      " << to_string(c.kind) << ", QI = " << c.index.qi << ", BI = " << c.index.bi
      << ", W-index = " << c.index.w << (c.nd.nondegenerate() ? ", nondegenerate" : ", degenerate") << "\n";
  out << "      ND1 " << c.nd.nd1 << "  ND2 " << c.nd.nd2 << "  ND3 " << c.nd.nd3 << "  ND4 " << c.nd.nd4 << "\n";
  if (pt.mult.sigma1.size() > 0) {
    out << "      sigma1 = " << vec(pt.mult.sigma1) << "  sigma2 = " << vec(pt.mult.sigma2) << "\n";
  }
  if (pt.mult.mu.size() > 0) out << "      mu = " << vec(pt.mult.mu) << "\n";
  if (pt.mult.lambda.size() > 0) out << "      lambda = " << vec(pt.mult.lambda) << "\n";
  if (!pt.mult.unique) out << "      multipliers not unique (LICQ fails)\n";
  if (c.stability) {
    out << "      strongly_stable = " << (c.stability->strongly_stable ? "true" : "false")
        << ", failure_reason = " << to_string(c.stability->failure_reason) << "\n";
  } else {
    out << "      strong stability: out of theorem scope (LICQ fails)\n";
  }
}

report::Json points_json(const Analysis& a) {
  report::Json arr = report::Json::array();
  for (std::size_t i = 0; i < a.points.size(); ++i) arr.push_back(report::point_json(a.points[i], a.classes[i]));
  return arr;
}

int cmd_analyze(const CommonArgs& args, std::ostream& out) {
  const Problem p = load(args);
  const StationarityConfig cfg = make_config(args);
  const Box box = make_box(args, p.dimension());
  const Analysis a = analyze_points(p, box, cfg);

  out << "W-stationary points: " << a.points.size() << "\n";
  for (std::size_t i = 0; i < a.points.size(); ++i) print_point(out, i, a.points[i], a.classes[i]);
  if (!a.search.rejected_sign.empty()) {
    out << "rejected candidates with mu < 0: " << a.search.rejected_sign.size() << "\n";
  }

  report::Json j = report::envelope("analyze", p, cfg.tol);
  j["box"] = report::box_json(box);
  j["seed"] = cfg.seed;
  j["points"] = points_json(a);
  j["search"] = {{"solves", a.search.solves},
                 {"singular_solves", a.search.singular_solves},
                 {"rejected_sign", a.search.rejected_sign.size()}};
  write_json(args, j, out);
  return kExitOk;
}

int cmd_relax(const CommonArgs& args, const RelaxArgs& r, std::ostream& out) {
  if (!(r.t0 > 0.0)) throw InputError("--t0 must be positive");
  if (!(r.rho > 0.0 && r.rho < 1.0)) throw InputError("--rho must lie in (0, 1)");
  if (!(r.tmin > 0.0 && r.tmin <= r.t0)) throw InputError("--tmin must lie in (0, t0]");
  const Problem p = load(args);
  const StationarityConfig cfg = make_config(args);
  const Box box = make_box(args, p.dimension());

  const Analysis a = analyze_points(p, box, cfg);
  const RelaxedProblem rp = relax(p, r.t0);
  const auto seeds = kkt_points_relaxed(rp, box, cfg);
  ContinuationOptions opts;
  opts.rho = r.rho;
  opts.t_min = r.tmin;

  bool lost = false;
  report::Json paths = report::Json::array();
  out << "relaxed KKT points at t0 = " << num(r.t0) << ": " << seeds.size() << "\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const ContinuationPath path = continue_path(p, seeds[i], r.t0, opts, cfg, a.points);
    lost = lost || path.lost;
    out << "  path " << i + 1 << ": seed " << vec(seeds[i].x) << " -> limit " << vec(path.limit);
    if (path.matched_index) {
      out << "  matches point " << *path.matched_index + 1 << " ("
          << to_string(a.classes[*path.matched_index].kind) << ")";
    } else {
      out << "  no match";
    }
    out << ", samples " << path.samples.size() << ", final |multiplier| " << num(path.final_multiplier_norm);
    if (path.lost) out << ", " << path.message;
    out << "\n";
    report::Json pj = report::path_json(path);
    pj["seed"] = report::vector_json(seeds[i].x);
    paths.push_back(pj);
  }

  report::Json j = report::envelope("relax", p, cfg.tol);
  j["box"] = report::box_json(box);
  j["seed"] = cfg.seed;
  j["relaxation"] = {{"t0", r.t0}, {"rho", r.rho}, {"t_min", r.tmin}};
  j["points"] = points_json(a);
  j["paths"] = paths;
  write_json(args, j, out);
  return lost ? kExitNumerical : kExitOk;
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> levels;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      levels.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw InputError("--levels: '" + item + "' is not a number");
    }
  }
  std::sort(levels.begin(), levels.end());
  return levels;
}

std::vector<double> auto_levels(const SublevelProbe& probe, int count, std::vector<double> stationary_values) {
  std::vector<double> levels;
  const auto range = probe.objective_range();
  if (range) {
    const auto [lo, hi] = *range;
    if (count == 1 || hi == lo) {
      levels.push_back(lo);
    } else {
      for (int i = 0; i < count; ++i) levels.push_back(lo + (hi - lo) * i / (count - 1));
    }
  }
  std::sort(stationary_values.begin(), stationary_values.end());
  for (std::size_t i = 1; i < stationary_values.size(); ++i) {
    if (stationary_values[i] > stationary_values[i - 1]) {
      levels.push_back(0.5 * (stationary_values[i - 1] + stationary_values[i]));
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

int cmd_levelsets(const CommonArgs& args, const LevelArgs& l, std::ostream& out) {
  const Problem p = load(args);
  if (p.dimension() > 3) throw DimensionError("levelsets supports n <= 3, problem has n = " + std::to_string(p.dimension()));
  if (!l.levels.empty() && l.auto_levels > 0) throw InputError("--levels and --auto are mutually exclusive");
  if (l.auto_levels < 0) throw InputError("--auto expects a positive count");
  const StationarityConfig cfg = make_config(args);
  GridSpec grid;
  grid.box = make_box(args, p.dimension());
  grid.resolution = l.grid > 0 ? l.grid : GridSpec::default_resolution(p.dimension());
  grid.validate();

  const Analysis a = analyze_points(p, grid.box, cfg);
  std::vector<double> values;
  for (const auto& c : a.classes) values.push_back(c.objective);

  const SublevelProbe probe(p, grid);
  const std::vector<double> levels =
      l.levels.empty() ? auto_levels(probe, l.auto_levels > 0 ? l.auto_levels : 8, values) : parse_levels(l.levels);
  const LevelSweep sweep = sweep_levels(probe, levels);
  const CriticalLevelReport critical = critical_level_report(sweep, values);

  out << "W-stationary points: " << a.points.size() << "\n";
  for (std::size_t i = 0; i < a.points.size(); ++i) print_point(out, i, a.points[i], a.classes[i]);
  out << "grid " << grid.resolution << " per axis\n";
  for (std::size_t i = 0; i < sweep.levels.size(); ++i) {
    out << "  level " << num(sweep.levels[i]) << ": " << sweep.counts[i] << " component(s)\n";
  }
  out << "critical levels: " << (critical.consistent ? "CONSISTENT" : "VIOLATION") << "\n";

  report::Json j = report::envelope("levelsets", p, cfg.tol);
  j["box"] = report::box_json(grid.box);
  j["seed"] = cfg.seed;
  j["grid"] = {{"resolution", grid.resolution}};
  j["points"] = points_json(a);
  j["sweep"] = report::sweep_json(sweep, critical);

  report::Json cells = report::Json::array();
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const int w = a.classes[i].index.w;
    cells.push_back({{"point", i + 1}, {"w_index", w}, {"status", w >= 2 ? "not checked" : "component count"}});
  }
  j["cell_attachment"] = cells;

  const bool all_nondegenerate =
      std::all_of(a.classes.begin(), a.classes.end(), [](const Classification& c) { return c.nd.nondegenerate(); });
  if (all_nondegenerate) {
    const MountainPassReport mp = mountain_pass_check(a.classes, {l.compact, l.connected});
    out << "mountain pass: r = " << mp.r << ", r_s = " << mp.r_s << ", r_s >= r - 1 " << (mp.holds ? "holds" : "fails");
    if (!mp.tied_values.empty()) out << " (tied stationary values present)";
    out << "\n";
    j["mountain_pass"] = report::mountain_pass_json(mp);
  } else {
    out << "mountain pass: skipped, a stationary point is degenerate\n";
    j["mountain_pass"] = {{"status", "skipped: degenerate stationary point"}};
  }

  if (l.labels) {
    report::Json grids = report::Json::array();
    for (double level : sweep.levels) grids.push_back({{"level", level}, {"labels", probe.labels(level)}});
    j["label_grids"] = grids;
  }
  write_json(args, j, out);
  return kExitOk;
}

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("problem", a.file, "Problem file")->required();
  sub->add_option("--json", a.json_path, "Write the JSON report to this path ('-' for stdout)");
  sub->add_option("--tol", a.tol, "Tolerance override key=value (repeatable)")->take_all();
  sub->add_option("--threads", a.threads, "Worker threads (0 = hardware concurrency)");
  sub->add_option("--seed", a.seed, "Multi-start jitter seed (0 = none)");
  sub->add_option("--box", a.box, "Search box lo hi applied to every axis")->expected(2);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stationary points of programs with switching constraints"};
  app.name("mpsc");
  app.require_subcommand(1);
  app.set_version_flag("--version", report::kVersion);

  CommonArgs common;
  RelaxArgs relax_args;
  LevelArgs level_args;

  auto* analyze = app.add_subcommand("analyze", "Find and classify W-stationary points");
  add_common(analyze, common);

  auto* relax_cmd = app.add_subcommand("relax", "Follow Scholtes relaxation paths as t -> 0");
  add_common(relax_cmd, common);
  relax_cmd->add_option("--t0", relax_args.t0, "Initial relaxation parameter");
  relax_cmd->add_option("--rho", relax_args.rho, "Reduction factor per step");
  relax_cmd->add_option("--tmin", relax_args.tmin, "Smallest relaxation parameter");

  auto* levels = app.add_subcommand("levelsets", "Count components of sub-level sets on a grid");
  add_common(levels, common);
  levels->add_option("--grid", level_args.grid, "Nodes per axis");
  levels->add_option("--levels", level_args.levels, "Comma-separated levels");
  levels->add_option("--auto", level_args.auto_levels, "Pick N levels across the grid range of f");
  levels->add_flag("--assume-compact", level_args.compact, "Assert that the feasible set is compact");
  levels->add_flag("--assume-connected", level_args.connected, "Assert that the feasible set is connected");
  levels->add_flag("--labels", level_args.labels, "Include per-level label grids in the JSON report");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << report::kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(common, out);
    if (relax_cmd->parsed()) return cmd_relax(common, relax_args, out);
    return cmd_levelsets(common, level_args, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CombinatorialExplosionError& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const SubsetCapError& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const DimensionError& e) {
    err << "unsupported dimension: " << e.what() << "\n";
    return kExitDimension;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace mpsc
