#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using nlohmann::json;
using testing_support::data_path;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr discarded.
Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + OVERSPEC_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

json cli_json(const std::string& args) {
  Run r = cli(args);
  REQUIRE(r.status == 0);
  return json::parse(r.out);
}

}  // namespace

TEST_CASE("detect") {
  json j = cli_json("detect --program " + data_path("programs/const_yplus.pl") + " --max-len 3");
  CHECK(j["verdict"] == 1);
  CHECK(j["witness"] == "a");
  json e = cli_json("detect --expr \"(CONST )\" --max-len 2");
  CHECK(e["verdict"] == 0);
  CHECK(e["instances_scanned"] == 13);
  CHECK(e["witness"].is_null());
}

TEST_CASE("detect CSV has one row per instance") {
  Run r = cli("--csv detect --expr \"(CONST )\" --max-len 2");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("instance,status,output,v_bw,steps\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 14);
}

TEST_CASE("halting gadget and semi-decision") {
  json g = cli_json("halting-gadget --tm " + data_path("tm/halt4.json") +
                    " --input 111 --pad-cap 2");
  CHECK(g["total_fragment"] == true);
  CHECK(g["detection"]["verdict"] == 1);
  CHECK(g["detection"]["witness"] == "a##");
  json s = cli_json("semidecide --expr \"(CONST )\" --stages 500");
  CHECK(s["status"] == "EXHAUSTED");
  json y = cli_json("semidecide --expr \"(CONST YDyn)\" --stages 500");
  CHECK(y["status"] == "ACCEPTED");
  CHECK(y["witness"] == "a");
}

TEST_CASE("fixed point and audit") {
  json f = cli_json("fixed-point --phi detector-backed");
  CHECK(f["phi_of_e_star_equals_e_star"] == true);
  CHECK(f["detection"]["verdict"] == 1);
  json c = cli_json("fixed-point --phi constant-epsilon");
  CHECK(c["phi_of_e_star"] == "(CONST )");
  CHECK(c["detection"]["verdict"] == 0);
  Run a = cli("audit-phi --phi detector-backed --programs " + data_path("programs") +
              " --with-fixed-point");
  CHECK(a.status == 0);
  CHECK(a.out.find("uniform") != std::string::npos);
}

TEST_CASE("aggregation commands") {
  json a = cli_json("asymmetry --population " + data_path("populations/mixed_alpha.json") +
                    " --delta 2");
  CHECK(a["ratio"] == 1.5);
  CHECK(a["lambda_eff"] == 1.5);
  json m = cli_json("majority --profile " + data_path("profiles/condorcet.json"));
  CHECK(m["cyclic"] == true);
  json b = cli_json("btl-experiment --population " + data_path("populations/equal_alpha.json") +
                    " --samples 5000 --runs 3 --seed 1");
  CHECK(b["runs"] == 3);
  CHECK(b["positive_runs"] == 3);
  Run csv = cli("--csv btl-experiment --population " + data_path("populations/equal_alpha.json") +
                " --samples 5000 --runs 3 --seed 1");
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 4);
}

TEST_CASE("scenario validation and demo") {
  CHECK(cli("validate-scenario").status == 0);
  CHECK(cli("--scenario " + data_path("scenarios/default.json") + " validate-scenario").status == 0);
  Run bad = cli("--scenario " + data_path("scenarios/warrant_not_subset.json") + " validate-scenario");
  CHECK(bad.status == 1);
  CHECK(json::parse(bad.out)["ok"] == false);
  CHECK(cli("demo").status == 0);
}

TEST_CASE("input errors exit with status 1") {
  CHECK(cli("detect --expr \"(CONST\"").status == 1);
  CHECK(cli("detect --program " + data_path("missing.pl")).status == 1);
  CHECK(cli("detect --no-such-flag").status == 1);
  CHECK(cli("no-such-command").status == 1);
  CHECK(cli("asymmetry --population " + data_path("missing.json")).status == 1);
  CHECK(cli("halting-gadget --tm " + data_path("tm/runaway.json") + " --input 2").status == 1);
  CHECK(cli("fixed-point --phi nope").status == 1);
}

namespace {

enum class Kind { kNumber, kString, kBool, kArray, kObject, kStringOrNull };

bool has_kind(const json& v, Kind k) {
  switch (k) {
    case Kind::kNumber: return v.is_number();
    case Kind::kString: return v.is_string();
    case Kind::kBool: return v.is_boolean();
    case Kind::kArray: return v.is_array();
    case Kind::kObject: return v.is_object();
    case Kind::kStringOrNull: return v.is_string() || v.is_null();
  }
  return false;
}

using Shape = std::vector<std::pair<std::string, Kind>>;

void check_shape(const std::string& args, const Shape& shape) {
  CAPTURE(args);
  json j = cli_json(args);
  REQUIRE(j.is_object());
  CHECK(j.size() == shape.size());
  for (const auto& [key, kind] : shape) {
    CAPTURE(key);
    REQUIRE(j.contains(key));
    CHECK(has_kind(j[key], kind));
  }
}

}  // namespace

TEST_CASE("reports match their published shapes") {
  using K = Kind;
  const Shape detection = {{"program", K::kString},        {"verdict", K::kNumber},
                           {"witness", K::kStringOrNull},  {"n_cap", K::kNumber},
                           {"domain_size", K::kNumber},    {"instances_scanned", K::kNumber},
                           {"eval_steps_total", K::kNumber}, {"budget_exceeded_on", K::kArray}};
  check_shape("validate-scenario", {{"ok", K::kBool},
                                    {"violations", K::kArray},
                                    {"instances_checked", K::kNumber},
                                    {"check_bound", K::kNumber}});
  check_shape("detect --expr \"(CONST )\" --max-len 1", detection);
  check_shape("detect --expr \"(CONST YDyn)\" --max-len 1", detection);
  check_shape("semidecide --expr \"(CONST YDyn)\" --stages 50",
              {{"program", K::kString}, {"status", K::kString}, {"witness", K::kStringOrNull},
               {"stage_reached", K::kNumber}, {"evaluations", K::kNumber}});
  check_shape("halting-gadget --tm " + data_path("tm/halt1.json") + " --input 1 --pad-cap 1",
              {{"program", K::kString}, {"total_fragment", K::kBool}, {"detection", K::kObject}});
  check_shape("fixed-point --phi detector-backed",
              {{"phi", K::kString}, {"e_star", K::kString}, {"phi_of_e_star", K::kString},
               {"phi_of_e_star_equals_e_star", K::kBool}, {"detection", K::kObject},
               {"witness_in_pad_family", K::kBool}, {"spot_checks", K::kArray},
               {"spot_checks_agree", K::kBool}});
  check_shape("audit-phi --phi detector-backed --programs " + data_path("programs"),
              {{"conservativeness", K::kObject}, {"uniform_elimination", K::kObject}});
  check_shape("btl-experiment --population " + data_path("populations/equal_alpha.json") +
                  " --samples 500 --runs 2 --seed 1",
              {{"delta_v", K::kNumber}, {"samples", K::kNumber}, {"runs", K::kNumber},
               {"positive_runs", K::kNumber}, {"median_fitted_delta", K::kNumber},
               {"analytic_win_probability", K::kNumber}});
  check_shape("asymmetry --population " + data_path("populations/mixed_alpha.json") +
                  " --delta 2",
              {{"delta", K::kNumber}, {"r_plus", K::kNumber}, {"r_zero", K::kNumber},
               {"r_minus", K::kNumber}, {"over_gap", K::kNumber}, {"under_gap", K::kNumber},
               {"ratio", K::kNumber}, {"lambda_eff", K::kNumber}});
  check_shape("majority --profile " + data_path("profiles/condorcet.json"),
              {{"candidates", K::kArray}, {"evaluators", K::kNumber}, {"majority", K::kArray},
               {"cyclic", K::kBool}});
  check_shape("demo", {{"phi", K::kString}, {"e_star", K::kString},
                       {"phi_of_e_star_equals_e_star", K::kBool}, {"verdict", K::kNumber},
                       {"witness", K::kString}, {"report", K::kObject}});
}
