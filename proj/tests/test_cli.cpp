#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "doctest.h"
#include "mpsc/cli.hpp"

using namespace mpsc;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string problem(const std::string& name) { return std::string(MPSC_PROBLEM_DIR) + "/" + name; }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content = "") {
  const fs::path p = fs::temp_directory_path() / ("mpsc_test_cli_" + name);
  if (!content.empty()) std::ofstream(p) << content;
  return p;
}

Json json_of(const std::vector<std::string>& args) {
  std::vector<std::string> a = args;
  a.push_back("--json");
  a.push_back("-");
  const Run r = run(a);
  REQUIRE(r.code == 0);
  // Text output precedes the report; the report is the trailing JSON object.
  const auto brace = r.out.find("\n{");
  REQUIRE(brace != std::string::npos);
  return Json::parse(r.out.substr(brace + 1));
}

bool keys_sorted(const Json& j) {
  if (j.is_object()) {
    std::string prev;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first && it.key() < prev) return false;
      prev = it.key();
      first = false;
      if (!keys_sorted(it.value())) return false;
    }
  } else if (j.is_array()) {
    for (const auto& e : j)
      if (!keys_sorted(e)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("analyze prints and reports the stationary points") {
  const Run r = run({"analyze", problem("scholtes.mpsc")});
  CHECK(r.code == 0);
  CHECK(r.out.find("W-stationary points: 3") != std::string::npos);

  const Json j = json_of({"analyze", problem("scholtes.mpsc")});
  CHECK(j["command"] == "analyze");
  REQUIRE(j["points"].size() == 3);
  int minimizers = 0, saddles = 0;
  for (const auto& pt : j["points"]) {
    CHECK(pt["nondegeneracy"]["nondegenerate"] == true);
    CHECK(pt["stability"]["strongly_stable"] == true);
    if (pt["index"]["w_index"] == 0) ++minimizers;
    if (pt["index"]["w_index"] == 1) ++saddles;
  }
  CHECK(minimizers == 2);
  CHECK(saddles == 1);
  CHECK(keys_sorted(j));
}

TEST_CASE("instability examples report ND3 failure") {
  for (const char* name : {"instability1.mpsc", "instability2.mpsc"}) {
    const Json j = json_of({"analyze", problem(name)});
    REQUIRE(j["points"].size() == 1);
    const Json& s = j["points"][0]["stability"];
    CHECK(s["strongly_stable"] == false);
    CHECK(s["failure_reason"] == "ND3_FAILS");
  }
}

TEST_CASE("inequality witness: stable although ND2 fails") {
  const Json j = json_of({"analyze", problem("ineq_witness.mpsc")});
  REQUIRE(j["points"].size() == 1);
  CHECK(j["points"][0]["nondegeneracy"]["ND2"] == false);
  CHECK(j["points"][0]["stability"]["strongly_stable"] == true);
}

TEST_CASE("input errors exit with code 2 and write no report") {
  const fs::path report = temp_file("typo.json");
  fs::remove(report);
  const Run typo = run({"analyze", std::string(MPSC_PROBLEM_DIR) + "/../tests/data/typo.mpsc", "--json", report.string()});
  CHECK(typo.code == kExitInput);
  CHECK(typo.err.find("x3") != std::string::npos);
  CHECK(typo.err.find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(report));

  CHECK(run({"analyze", problem("missing.mpsc")}).code == kExitInput);
  CHECK(run({"relax", problem("scholtes.mpsc"), "--t0", "-1"}).code == kExitInput);
  CHECK(run({"relax", problem("scholtes.mpsc"), "--rho", "1.5"}).code == kExitInput);
  CHECK(run({"analyze", problem("cross.mpsc"), "--tol", "bogus=1"}).code == kExitInput);
  CHECK(run({"analyze", problem("cross.mpsc"), "--tol", "resid"}).code == kExitInput);
  CHECK(run({"analyze", problem("cross.mpsc"), "--box", "1", "-1"}).code == kExitInput);
  CHECK(run({"levelsets", problem("cross.mpsc"), "--levels", "1,x"}).code == kExitInput);
  CHECK(run({"levelsets", problem("cross.mpsc"), "--levels", "1", "--auto", "3"}).code == kExitInput);
  CHECK(run({"levelsets", problem("cross.mpsc"), "--grid", "8"}).code == kExitInput);
  CHECK(run({"frobnicate"}).code == kExitInput);
  CHECK(run({}).code == kExitInput);
}

TEST_CASE("tolerance overrides are echoed in the report") {
  const Json j = json_of({"analyze", problem("cross.mpsc"), "--tol", "resid=1e-9", "dedup=1e-5"});
  CHECK(j["tolerances"]["resid"] == 1e-9);
  CHECK(j["tolerances"]["dedup"] == 1e-5);
  CHECK(j["tolerances"].size() == 10);
}

TEST_CASE("relax follows every relaxed KKT point to a stationary point") {
  const Json j = json_of({"relax", problem("scholtes.mpsc")});
  REQUIRE(j["paths"].size() == 3);
  std::vector<int> matched;
  for (const auto& path : j["paths"]) {
    CHECK(path["lost"] == false);
    REQUIRE(path["matched_point"].is_number());
    matched.push_back(path["matched_point"].get<int>());
  }
  std::sort(matched.begin(), matched.end());
  CHECK(matched == std::vector<int>{1, 2, 3});
}

TEST_CASE("levelsets") {
  const Run big = run({"levelsets", problem("scholtes.mpsc")});
  CHECK(big.code == 0);
  CHECK(big.out.find("critical levels: CONSISTENT") != std::string::npos);

  const fs::path four = temp_file("four.mpsc", "vars: a b c d\nobjective: a^2 + b^2 + c^2 + d^2\nswitch: a | b\n");
  CHECK(run({"levelsets", four.string()}).code == kExitDimension);

  const Json j = json_of({"levelsets", problem("scholtes.mpsc"), "--auto", "8", "--assume-compact"});
  const auto& counts = j["sweep"]["counts"];
  // Counts rise to two before the saddle value and fall to one after it.
  std::vector<int> distinct;
  for (const auto& c : counts)
    if (distinct.empty() || distinct.back() != c.get<int>()) distinct.push_back(c.get<int>());
  CHECK(distinct == std::vector<int>{0, 2, 1});
  CHECK(j["sweep"]["critical_levels"]["status"] == "CONSISTENT");
  CHECK(j["mountain_pass"]["r"] == 2);
  CHECK(j["mountain_pass"]["r_s"] == 1);
  CHECK(j["mountain_pass"]["holds"] == true);

  const Json explicit_levels = json_of({"levelsets", problem("cross.mpsc"), "--levels", "-1,1", "--labels", "--grid", "41"});
  CHECK(explicit_levels["sweep"]["counts"] == Json::array({2, 1}));
  REQUIRE(explicit_levels["label_grids"].size() == 2);
  CHECK(explicit_levels["label_grids"][0]["labels"].size() == 41 * 41);

  const Json degenerate = json_of({"levelsets", problem("instability1.mpsc"), "--levels", "0.5"});
  CHECK(degenerate["mountain_pass"]["status"] == "skipped: degenerate stationary point");
}

TEST_CASE("pattern cap exits with code 3") {
  std::string text = "vars:";
  for (int i = 0; i < 24; ++i) text += " x" + std::to_string(i);
  text += "\nobjective: x0\n";
  for (int i = 0; i < 24; i += 2) text += "switch: x" + std::to_string(i) + " | x" + std::to_string(i + 1) + "\n";
  const fs::path f = temp_file("cap.mpsc", text);
  CHECK(run({"analyze", f.string()}).code == kExitCap);
}

TEST_CASE("JSON reports are byte-identical across runs and thread counts") {
  for (const char* cmd : {"analyze", "relax"}) {
    const Run a = run({cmd, problem("scholtes.mpsc"), "--json", "-", "--threads", "1"});
    const Run b = run({cmd, problem("scholtes.mpsc"), "--json", "-", "--threads", "1"});
    const Run c = run({cmd, problem("scholtes.mpsc"), "--json", "-", "--threads", "4"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
  }
  const fs::path f1 = temp_file("det1.json"), f2 = temp_file("det2.json");
  REQUIRE(run({"levelsets", problem("cross.mpsc"), "--grid", "101", "--json", f1.string()}).code == 0);
  REQUIRE(run({"levelsets", problem("cross.mpsc"), "--grid", "101", "--json", f2.string(), "--threads", "3"}).code == 0);
  std::ifstream i1(f1), i2(f2);
  std::stringstream s1, s2;
  s1 << i1.rdbuf();
  s2 << i2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK(keys_sorted(Json::parse(s1.str())));
}

TEST_CASE("help and version") {
  CHECK(run({"--help"}).code == 0);
  const Run v = run({"--version"});
  CHECK(v.code == 0);
  CHECK_FALSE(v.out.empty());
}
