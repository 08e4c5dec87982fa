#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

using Json = nlohmann::json;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  REQUIRE(f.good());
  f << text;
}

std::string job_path(const std::string& name) { return std::string(JOBS_DIR) + "/" + name; }

}  // namespace

TEST_CASE("closure job reports three generators and closes", "[cli]") {
  const std::string out = "/tmp/involute_cli_heis.json";
  const int rc = run_cli("-i " + job_path("heisenberg-closure.json") + " -o " + out);
  REQUIRE(rc == 0);
  const Json rep = Json::parse(slurp(out));
  CHECK(rep["task"] == "bracket-closure");
  CHECK(rep["truncated"] == false);
  CHECK(rep["report"]["closure"]["state"] == "closed");
  CHECK(rep["report"]["closure"]["generators"].size() == 3);
  CHECK(rep["report"]["closure"]["bracket_depth"] == 1);
  CHECK(rep["tool"]["name"] == "involute-cli");
}

TEST_CASE("degeneracy locus job certifies the empty locus", "[cli]") {
  const std::string out = "/tmp/involute_cli_dinfty.json";
  REQUIRE(run_cli("-i " + job_path("heisenberg-dinfty.json") + " -o " + out) == 0);
  const Json rep = Json::parse(slurp(out));
  CHECK(rep["report"]["locus"]["certified_empty"] == true);
  CHECK(rep["report"]["locus"]["outer_approximation"] == false);
}

TEST_CASE("schema violations carry json pointers", "[cli]") {
  const std::string job = "/tmp/involute_cli_bad_field.json";
  const std::string out = "/tmp/involute_cli_bad_field_out.json";
  spit(job, R"({"version": 1, "task": "chain", "split": {"base": 1}, "stages": [["x1"]],
                "samples": [[0]], "bogus": 1})");
  REQUIRE(run_cli("-i " + job + " -o " + out) == 1);
  const Json rep = Json::parse(slurp(out));
  CHECK(rep["error"]["pointer"] == "/bogus");
  CHECK(rep["error"]["message"] == "unknown field 'bogus'");

  spit(job, R"({"version": 1, "task": "chain"})");
  REQUIRE(run_cli("-i " + job + " -o " + out) == 1);
  const Json rep2 = Json::parse(slurp(out));
  CHECK(rep2["error"]["message"] == "missing required field 'split'");

  spit(job, R"({"version": 2, "task": "chain"})");
  REQUIRE(run_cli("-i " + job + " -o " + out) == 1);
  CHECK(Json::parse(slurp(out))["error"]["pointer"] == "/version");

  spit(job, R"({"version": 1, "task": "frobnicate"})");
  REQUIRE(run_cli("-i " + job + " -o " + out) == 1);
  CHECK(Json::parse(slurp(out))["error"]["pointer"] == "/task");
}

TEST_CASE("polynomial errors carry their position", "[cli]") {
  const std::string job = "/tmp/involute_cli_bad_poly.json";
  const std::string out = "/tmp/involute_cli_bad_poly_out.json";
  spit(job, R"({"version": 1, "task": "groebner", "split": {"base": 1, "fiber": 1},
                "generators": ["u1^"]})");
  REQUIRE(run_cli("-i " + job + " -o " + out) == 1);
  const Json rep = Json::parse(slurp(out));
  CHECK(rep["error"]["pointer"] == "/generators/0");
  CHECK(rep["error"]["message"].get<std::string>().find("at 3") != std::string::npos);
}

TEST_CASE("reports are byte-identical for the same job and seed", "[cli]") {
  const std::string a = "/tmp/involute_cli_det_a.json";
  const std::string b = "/tmp/involute_cli_det_b.json";
  const std::string c = "/tmp/involute_cli_det_c.json";
  REQUIRE(run_cli("-i " + job_path("projection-probe-demo.json") + " -o " + a) == 0);
  REQUIRE(run_cli("-i " + job_path("projection-probe-demo.json") + " -o " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  REQUIRE(run_cli("-i " + job_path("projection-probe-demo.json") + " -o " + c + " --seed 99") ==
          0);
  CHECK(slurp(a) != slurp(c));
}

TEST_CASE("a depth cap of zero truncates the scan and exits 2", "[cli]") {
  const std::string out = "/tmp/involute_cli_cap0.json";
  const int rc =
      run_cli("-i " + job_path("flat-scan.json") + " -o " + out + " --max-depth 0");
  REQUIRE(rc == 2);
  const Json rep = Json::parse(slurp(out));
  CHECK(rep["truncated"] == true);
  CHECK(rep["report"]["closure_state"] == "budget-exhausted");
  CHECK(rep["config"]["closure"]["max_depth"] == 0);
}

TEST_CASE("flag overrides are echoed in the effective config", "[cli]") {
  const std::string out = "/tmp/involute_cli_override.json";
  REQUIRE(run_cli("-i " + job_path("heisenberg-closure.json") + " -o " + out +
                  " --max-depth 2 --gb-budget 500") == 0);
  const Json rep = Json::parse(slurp(out));
  CHECK(rep["config"]["closure"]["max_depth"] == 2);
  CHECK(rep["config"]["closure"]["gb_budget"] == 500);
}

TEST_CASE("randomized tasks demand a seed", "[cli]") {
  const std::string job = "/tmp/involute_cli_noseed.json";
  const std::string out = "/tmp/involute_cli_noseed_out.json";
  spit(job, R"({"version": 1, "task": "projection-probe", "split": {"base": 1, "fiber": 1},
                "set": {"positive": ["u1"]}, "samples": {"count": 3}})");
  REQUIRE(run_cli("-i " + job + " -o " + out) == 1);
  CHECK(Json::parse(slurp(out))["error"]["pointer"] == "/params/seed");
  REQUIRE(run_cli("-i " + job + " -o " + out + " --seed 4") == 0);
}

TEST_CASE("leaf jobs write a csv grid", "[cli]") {
  const std::string job = "/tmp/involute_cli_leaf.json";
  const std::string out = "/tmp/involute_cli_leaf_out.json";
  const std::string csv = "/tmp/involute_cli_leaf_grid.csv";
  spit(job, R"({"version": 1, "task": "leaf", "split": {"base": 3, "fiber": 0},
    "fields": [
      {"name": "R1", "components": ["0", "-1*x3", "x2"]},
      {"name": "R2", "components": ["x3", "0", "-1*x1"]}
    ],
    "params": {"center": [1, 0, 0], "box": [[-0.3, 0.3], [-0.3, 0.3]], "resolution": 5,
               "tolerance": 0.01},
    "csv": ")" + csv + R"("})");
  REQUIRE(run_cli("-i " + job + " -o " + out) == 0);
  const Json rep = Json::parse(slurp(out));
  CHECK(rep["report"]["leaf"]["complete"] == true);
  CHECK(rep["report"]["tangency"]["pass"] == true);
  const std::string table = slurp(csv);
  CHECK(table.substr(0, table.find('\n')) == "index,k1,k2,x1,x2,x3");
  CHECK(std::count(table.begin(), table.end(), '\n') == 26);
}

TEST_CASE("groebner queries decide membership through the cli", "[cli]") {
  const std::string out = "/tmp/involute_cli_gb.json";
  REQUIRE(run_cli("-i " + job_path("groebner-demo.json") + " -o " + out) == 0);
  const Json rep = Json::parse(slurp(out));
  CHECK(rep["report"]["basis"]["groebner"] == true);
  CHECK(rep["report"]["basis"]["generators"] == Json::parse(R"([["1"]])"));
  for (const auto& q : rep["report"]["queries"]) CHECK(q["member"] == true);
}

TEST_CASE("explicit sample lists refuse a samples override", "[cli]") {
  const std::string job = "/tmp/involute_cli_fixed_samples.json";
  const std::string out = "/tmp/involute_cli_fixed_samples_out.json";
  spit(job, R"({"version": 1, "task": "projection-probe", "split": {"base": 1, "fiber": 1},
                "set": {"positive": ["u1"]}, "samples": [[1], [2]],
                "params": {"seed": 1}})");
  REQUIRE(run_cli("-i " + job + " -o " + out + " --samples 5") == 1);
  CHECK(Json::parse(slurp(out))["error"]["pointer"] == "/samples");
  REQUIRE(run_cli("-i " + job + " -o " + out) == 0);
}
