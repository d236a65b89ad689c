#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bmatch/instance.hpp"
#include "bmatch/json_io.hpp"
#include "json.hpp"
#include "support/fixtures.hpp"

// BMATCH_CLI_PATH is injected by the build as the path to the built binary.

namespace {

const std::string& scratch_dir() {
  static const std::string dir = [] {
    std::string tmpl = "/tmp/bmcliXXXXXX";
    const char* made = mkdtemp(tmpl.data());
    REQUIRE(made != nullptr);
    return tmpl;
  }();
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

std::string temp_path(const std::string& name) {
  return scratch_dir() + "/" + name;
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string out_path = temp_path("stdout." + std::to_string(counter));
  const std::string err_path = temp_path("stderr." + std::to_string(counter));
  ++counter;
  const std::string command = std::string(BMATCH_CLI_PATH) + " " + args +
                              " >" + out_path + " 2>" + err_path;
  const int status = std::system(command.c_str());
  RunResult result;
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  result.code = WEXITSTATUS(status);
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

std::string write_fixture(const std::string& name,
                          const bmatch::PreferenceInstance& inst) {
  const std::string path = temp_path(name);
  spit(path, bmatch::serialize_instance(inst));
  return path;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("generate writes a report and an instance file") {
  const std::string out = temp_path("gen10.json");
  const auto result =
      run_cli("generate --variant global --n 10 --seed 1 -o " + out);
  CHECK(result.code == 0);
  CHECK(result.out == "n=10 m=45 B=10\n");
  CHECK(result.err.empty());
  const auto inst = bmatch::parse_instance(slurp(out));
  CHECK(inst.peer_count() == 10);
  CHECK(inst.edge_count() == 45);
}

TEST_CASE("generate without an output file streams JSON to stdout") {
  const auto result = run_cli("generate --variant global --n 4 --seed 2");
  CHECK(result.code == 0);
  CHECK(result.err == "n=4 m=6 B=4\n");
  const auto inst = bmatch::parse_instance(result.out);
  CHECK(inst.peer_count() == 4);
}

TEST_CASE("generate rejects impossible parameters") {
  const auto result = run_cli("generate --n 3 --quota 0");
  CHECK(result.code == 2);
  CHECK(contains(result.err, "error:"));
}

TEST_CASE("analyze prints loving pairs and the solution count") {
  const auto path = write_fixture("triangle.json", fixtures::triangle());
  const auto result = run_cli("analyze " + path);
  CHECK(result.code == 0);
  CHECK(result.out ==
        "acyclic; loving pairs: (0,1); stable configurations: 1\n");
}

TEST_CASE("analyze reports cycles with the witness") {
  const auto path = write_fixture("cyclic.json", fixtures::four_cyclic());
  const auto result = run_cli("analyze " + path);
  CHECK(result.code == 0);
  CHECK(result.out == "cycle found: 0→1→2; stable configurations: 0\n");
}

TEST_CASE("analyze marks the empty solution") {
  const auto path = write_fixture("isolated.json", fixtures::isolated_pair());
  const auto result = run_cli("analyze " + path);
  CHECK(result.code == 0);
  CHECK(result.out ==
        "acyclic; loving pairs: none; stable configurations: 1 (C_∅)\n");
}

TEST_CASE("analyze skips the oracle over the guard until raised") {
  const std::string big = temp_path("gen11.json");
  REQUIRE(run_cli("generate --variant global --n 11 --seed 9 -o " + big).code ==
          0);
  const auto guarded = run_cli("analyze " + big);
  CHECK(guarded.code == 0);
  CHECK(contains(guarded.out,
                 "stable configurations: skipped (over oracle guard)"));
  const auto raised = run_cli("analyze " + big + " --guard-peers 11");
  CHECK(raised.code == 0);
  CHECK(contains(raised.out, "stable configurations: 1\n"));
}

TEST_CASE("solve prints the configuration and plan length") {
  const auto path = write_fixture("tri-solve.json", fixtures::triangle());
  const auto result = run_cli("solve " + path);
  CHECK(result.code == 0);
  CHECK(result.out ==
        "stable configuration: {\"pairs\":[[0,1]]}\n"
        "plan length: 1 (bound 1)\n");
}

TEST_CASE("solve writes configuration and plan files") {
  const auto path = write_fixture("four-solve.json", fixtures::four_global());
  const std::string config_path = temp_path("four.stable.json");
  const std::string plan_path = temp_path("four.plan.json");
  const auto result =
      run_cli("solve " + path + " -o " + config_path + " --plan " + plan_path);
  CHECK(result.code == 0);
  CHECK(result.out == "plan length: 2 (bound 2)\n");
  CHECK(slurp(config_path) == "{\"pairs\":[[0,1],[2,3]]}\n");
  CHECK(slurp(plan_path) == "{\"actions\":[[0,1],[2,3]]}\n");
}

TEST_CASE("solve fails loudly on a cyclic instance") {
  const auto path = write_fixture("cyc-solve.json", fixtures::four_cyclic());
  const auto result = run_cli("solve " + path);
  CHECK(result.code == 2);
  CHECK(result.err == "error: instance has a preference cycle: 0 1 2\n");
}

TEST_CASE("simulate converges to the solver answer") {
  const auto path = write_fixture("four-sim.json", fixtures::four_global());
  const std::string stats_path = temp_path("four.stats.json");
  const auto result = run_cli("simulate " + path +
                              " --scheduler poisson --seed 3 --stats " +
                              stats_path);
  CHECK(result.code == 0);
  CHECK(contains(result.out, "converged: true\n"));
  CHECK_FALSE(contains(result.out, "rounds:"));  // poisson has no rounds
  const auto stats = nlohmann::json::parse(slurp(stats_path));
  CHECK(stats.at("converged") == true);
  CHECK(stats.at("final_configuration").at("pairs") ==
        nlohmann::json::parse("[[0,1],[2,3]]"));
}

TEST_CASE("simulate reports rounds under the periodic scheduler") {
  const auto path = write_fixture("tri-sim.json", fixtures::triangle());
  const auto result = run_cli("simulate " + path + " --seed 4");
  CHECK(result.code == 0);
  CHECK(contains(result.out, "rounds: 1\n"));
}

TEST_CASE("simulate exits nonzero when the run does not converge") {
  const auto path = write_fixture("cyc-sim.json", fixtures::four_cyclic());
  const auto result = run_cli("simulate " + path + " --max-steps 300");
  CHECK(result.code == 1);
  CHECK(contains(result.out, "converged: false\n"));
  CHECK(contains(result.out, "initiatives: 300"));
}

TEST_CASE("simulate from a stable start takes no initiative") {
  const auto path = write_fixture("tri-stable.json", fixtures::triangle());
  const std::string initial_path = temp_path("tri.initial.json");
  spit(initial_path, "{\"pairs\":[[0,1]]}\n");
  const auto result =
      run_cli("simulate " + path + " --initial " + initial_path);
  CHECK(result.code == 0);
  CHECK(contains(result.out, "initiatives: 0 (active 0)\n"));
  CHECK(contains(result.out, "rounds: 0\n"));
}

TEST_CASE("simulate records a replayable trace") {
  const auto path = write_fixture("four-trace.json", fixtures::four_global());
  const std::string trace_path = temp_path("four.trace.jsonl");
  const auto result = run_cli("simulate " + path + " --seed 6 --trace " +
                              trace_path);
  CHECK(result.code == 0);
  const std::string trace = slurp(trace_path);
  CHECK(contains(trace, "\"step\":1,"));
  std::istringstream lines(trace);
  std::string line;
  long long steps = 0;
  while (std::getline(lines, line)) {
    const auto event = nlohmann::json::parse(line);
    CHECK(event.at("step") == ++steps);
    CHECK(event.at("active").is_boolean());
  }
  CHECK(steps >= 2);  // four peers need at least two formations
}

TEST_CASE("experiment writes trial rows keyed by seed") {
  const auto path = write_fixture("four-exp.json", fixtures::four_global());
  const std::string csv_path = temp_path("exp.csv");
  const std::string summary_path = temp_path("exp.summary.json");
  const auto result =
      run_cli("experiment " + path + " --trials 10 --seed 5 --csv " + csv_path +
              " --summary " + summary_path + " --recheck");
  CHECK(result.code == 0);

  const std::string csv = slurp(csv_path);
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "trial,seed,initiatives,active_initiatives,rounds,converged");
  long long row_index = 0;
  while (std::getline(lines, line)) {
    const std::string prefix = std::to_string(row_index) + "," +
                               std::to_string(5 + row_index) + ",";
    CHECK(line.rfind(prefix, 0) == 0);
    CHECK(line.substr(line.size() - 5) == ",true");
    ++row_index;
  }
  CHECK(row_index == 10);

  const auto summary = nlohmann::json::parse(slurp(summary_path));
  CHECK(summary.at("trials") == 10);
  CHECK(summary.at("seed") == 5);
  CHECK(summary.at("convergence_rate") == 1.0);
  CHECK(summary.at("instance").at("peers") == 4);
  CHECK(summary.at("bounds").at("half_quota_sum") == 2.0);
  CHECK(summary.at("rounds").is_object());
  CHECK(summary.at("initiatives").at("max").get<long long>() >=
        summary.at("initiatives").at("min").get<long long>());
}

TEST_CASE("experiment leaves the rounds column empty under poisson") {
  const auto path = write_fixture("tri-exp.json", fixtures::triangle());
  const std::string csv_path = temp_path("poisson.csv");
  const std::string summary_path = temp_path("poisson.summary.json");
  const auto result = run_cli("experiment " + path +
                              " --scheduler poisson --trials 5 --csv " +
                              csv_path + " --summary " + summary_path);
  CHECK(result.code == 0);
  CHECK(contains(result.out, "poisson mean bound nB/4:"));

  std::istringstream lines(slurp(csv_path));
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::stringstream fields(line);
    std::string field;
    std::vector<std::string> row;
    while (std::getline(fields, field, ',')) row.push_back(field);
    REQUIRE(row.size() == 6);
    CHECK(row[4].empty());
  }
  CHECK(nlohmann::json::parse(slurp(summary_path)).at("rounds").is_null());
}

TEST_CASE("experiment output is deterministic and job-count independent") {
  const auto path = write_fixture("det-exp.json", fixtures::four_global());
  const auto csv_a = temp_path("det-a.csv");
  const auto csv_b = temp_path("det-b.csv");
  const auto csv_c = temp_path("det-c.csv");
  const std::string base = "experiment " + path +
                           " --strategy random --scheduler poisson"
                           " --trials 20 --seed 11 --csv ";
  CHECK(run_cli(base + csv_a).code == 0);
  CHECK(run_cli(base + csv_b).code == 0);
  CHECK(run_cli(base + csv_c + " --jobs 3").code == 0);
  CHECK(slurp(csv_a) == slurp(csv_b));
  CHECK(slurp(csv_a) == slurp(csv_c));
}

TEST_CASE("experiment can generate its own instance") {
  const auto result = run_cli(
      "experiment --variant global --n 6 --trials 5 --seed 2");
  CHECK(result.code == 0);
  CHECK(contains(result.out, "trials: 5 converged: 5"));
}

TEST_CASE("experiment requires an instance source") {
  const auto result = run_cli("experiment --trials 3");
  CHECK(result.code == 2);
  CHECK(contains(result.err, "instance file or --n"));
}

TEST_CASE("experiment flags non-convergence through its exit code") {
  const auto path = write_fixture("cyc-exp.json", fixtures::four_cyclic());
  const auto result =
      run_cli("experiment " + path + " --trials 3 --max-steps 200");
  CHECK(result.code == 1);
  CHECK(contains(result.out, "converged: 0"));
}

TEST_CASE("help and usage errors use the documented exit codes") {
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("simulate --help").code == 0);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("").code == 2);  // a subcommand is required
  CHECK(run_cli("analyze").code == 2);  // missing instance path
  CHECK(run_cli("analyze /no/such/file.json").code == 2);
}
