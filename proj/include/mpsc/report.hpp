#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mpsc/classify.hpp"
#include "mpsc/relaxation.hpp"
#include "mpsc/stationarity.hpp"
#include "mpsc/topology.hpp"

namespace mpsc::report {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// Field names follow the usual MPSC notation: J0, alpha, beta, gamma, QI, BI,
// w_index, sigma1, sigma2. Index sets are reported 1-based.

Json vector_json(const Vector& v);
Json problem_json(const Problem& p);
Json tolerance_json(const ToleranceConfig& tol);
Json box_json(const Box& box);
Json multipliers_json(const Multipliers& m);
Json index_sets_json(const IndexSets& idx);
Json nd_json(const NDReport& nd);
Json windex_json(const WIndex& w);
Json stability_json(const std::optional<StabilityVerdict>& v);
Json point_json(const WStationaryPoint& pt, const Classification& c);
Json path_json(const ContinuationPath& path);
Json sweep_json(const LevelSweep& sweep, const CriticalLevelReport& critical);
Json mountain_pass_json(const MountainPassReport& mp);

/// Envelope shared by every command.
Json envelope(const std::string& command, const Problem& p, const ToleranceConfig& tol);

/// Key-sorted, two-space indented, newline terminated.
std::string dump(const Json& j);

}  // namespace mpsc::report
