#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// End-to-end tests of the command-line binary: every case invokes the real
// executable (path injected at compile time) and inspects exit codes, the
// combined stdout/stderr stream, and the files it writes.

using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

int g_log_counter = 0;

RunResult run_cli(const std::string& args) {
  const fs::path log =
      fs::temp_directory_path() /
      ("ionweave_cli_log_" + std::to_string(g_log_counter++) + ".txt");
  const std::string cmd = std::string("\"") + CLI_PATH + "\" " + args +
                          " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  if (raw != -1 && WIFEXITED(raw)) r.code = WEXITSTATUS(raw);
  std::ifstream in(log, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  fs::remove(log);
  return r;
}

std::string fixture(const std::string& name) {
  return std::string(FIXTURES_DIR) + "/" + name;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("ionweave_cli_" + tag);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json slurp_json(const fs::path& p) { return Json::parse(slurp(p)); }

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("help succeeds and a bare invocation is an input error") {
  const RunResult help = run_cli("--help");
  CHECK(help.code == 0);
  CHECK(contains(help.output, "couplings"));
  CHECK(contains(help.output, "reproduce"));

  CHECK(run_cli("").code == 2);
  CHECK(run_cli("definitely-not-a-command").code == 2);
}

TEST_CASE("input failures exit 2 and write nothing") {
  const fs::path dir = fresh_dir("fail");
  const RunResult missing = run_cli("couplings --config /nonexistent_xyz.json --out \"" +
                                    dir.string() + "\"");
  CHECK(missing.code == 2);
  CHECK(!fs::exists(dir));

  const RunResult bad = run_cli("couplings --config \"" + fixture("bad.json") +
                                "\" --out \"" + dir.string() + "\"");
  CHECK(bad.code == 2);
  CHECK(contains(bad.output, "parse"));
  CHECK(!fs::exists(dir));
}

TEST_CASE("couplings writes the full file set with reference numbers") {
  const fs::path dir = fresh_dir("couplings");
  const RunResult r =
      run_cli("couplings --config \"" + fixture("config_two_ion.json") +
              "\" --out \"" + dir.string() + "\"");
  CHECK(r.code == 0);
  CHECK(contains(r.output, "couplings:"));

  for (const char* name : {"couplings.csv", "couplings.json", "modes.json",
                           "crystal.json", "run_report.json"})
    CHECK(fs::exists(dir / name));

  CHECK(slurp(dir / "couplings.csv").rfind("J_rad_per_s\n", 0) == 0);

  const Json cj = slurp_json(dir / "couplings.json");
  const double j12 = cj["j_rad_per_s"][0][1].get<double>();
  CHECK(std::abs(j12 - 3032.5258731848621) <= 1e-6 * 3032.5);
  CHECK(cj.contains("j_over_two_pi_hz"));

  const Json report = slurp_json(dir / "run_report.json");
  CHECK(report["command"] == "couplings");
  CHECK(report["metrics"]["ions"] == 2);
  CHECK(report["inputs"]["config"]["fnv1a64"].get<std::string>().rfind(
            "0x", 0) == 0);
  CHECK(report["outputs"].size() == 5);
}

TEST_CASE("data files are byte-identical across reruns") {
  const fs::path d1 = fresh_dir("det1");
  const fs::path d2 = fresh_dir("det2");
  const std::string base =
      "couplings --config \"" + fixture("config_two_ion.json") + "\" --out \"";
  REQUIRE(run_cli(base + d1.string() + "\"").code == 0);
  REQUIRE(run_cli(base + d2.string() + "\"").code == 0);
  // run_report.json embeds the wall clock, so it is excluded here.
  for (const char* name :
       {"couplings.csv", "couplings.json", "modes.json", "crystal.json"})
    CHECK(slurp(d1 / name) == slurp(d2 / name));
}

TEST_CASE("a zero gradient yields an all-zero coupling matrix") {
  const fs::path dir = fresh_dir("b0");
  REQUIRE(run_cli("couplings --config \"" + fixture("config_b0.json") +
                  "\" --out \"" + dir.string() + "\"")
              .code == 0);
  const Json cj = slurp_json(dir / "couplings.json");
  for (const auto& row : cj["j_rad_per_s"])
    for (const auto& v : row) CHECK(v.get<double>() == 0.0);
}

TEST_CASE("well scans are exposed as a subcommand") {
  const fs::path dir = fresh_dir("wells");
  const RunResult r = run_cli("wells --config \"" + fixture("config_scan.json") +
                              "\" --out \"" + dir.string() + "\"");
  CHECK(r.code == 0);
  CHECK(contains(r.output, "found 3"));
  CHECK(slurp_json(dir / "wells.json")["wells"].size() == 3);

  // Configurations without a scan block cannot answer a well query.
  CHECK(run_cli("wells --config \"" + fixture("config_two_ion.json") +
                "\" --out \"" + fresh_dir("wells2").string() + "\"")
            .code == 2);
}

TEST_CASE("modes reports the axial spectrum") {
  const fs::path dir = fresh_dir("modes");
  REQUIRE(run_cli("modes --config \"" + fixture("config_two_ion.json") +
                  "\" --out \"" + dir.string() + "\"")
              .code == 0);
  const Json mj = slurp_json(dir / "modes.json");
  REQUIRE(mj["frequencies_hz"].size() == 2);
  CHECK(std::abs(mj["frequencies_hz"][0].get<double>() - 200000.0) < 1e-3);
}

TEST_CASE("schedules build and execute through the CLI") {
  const fs::path build_dir = fresh_dir("sched_build");
  const RunResult build = run_cli("schedule build --rows 4 --gradient 100 --out \"" +
                                  build_dir.string() + "\"");
  CHECK(build.code == 0);
  const Json sj = slurp_json(build_dir / "schedule.json");
  CHECK(sj["n_qubits"] == 8);
  CHECK(slurp_json(build_dir / "run_report.json")["metrics"]["stages"] == 5);
  CHECK(fs::exists(build_dir / "catalogs.json"));

  CHECK(run_cli("schedule build --rows 3 --gradient 100 --out \"" +
                fresh_dir("sched_bad").string() + "\"")
            .code == 2);

  const fs::path ideal_dir = fresh_dir("sched_ideal");
  const RunResult ideal = run_cli(
      "schedule run --config \"" + (build_dir / "schedule.json").string() +
      "\" --catalogs \"" + (build_dir / "catalogs.json").string() +
      "\" --mode ideal --out \"" + ideal_dir.string() + "\"");
  CHECK(ideal.code == 0);
  const Json ir = slurp_json(ideal_dir / "execution_report.json");
  CHECK(ir["fidelity"].get<double>() >= 1.0 - 1e-9);

  const fs::path res_dir = fresh_dir("sched_residual");
  REQUIRE(run_cli("schedule run --config \"" +
                  (build_dir / "schedule.json").string() +
                  "\" --mode residual --out \"" + res_dir.string() + "\"")
              .code == 0);
  CHECK(slurp_json(res_dir / "execution_report.json")["fidelity"]
            .get<double>() >= 0.99);

  CHECK(run_cli("schedule run --config \"" +
                (build_dir / "schedule.json").string() +
                "\" --mode sideways --out \"" + fresh_dir("sched_mode").string() +
                "\"")
            .code == 2);
}

TEST_CASE("periodic search runs and replays identically") {
  const fs::path d1 = fresh_dir("search1");
  const fs::path d2 = fresh_dir("search2");
  const std::string base = "periodic search --config \"" +
                           fixture("problem_triangle.json") +
                           "\" --seed 3 --budget 25 --out \"";
  const RunResult a = run_cli(base + d1.string() + "\"");
  CHECK(a.code == 0);
  CHECK(contains(a.output, "25 evaluations"));
  REQUIRE(run_cli(base + d2.string() + "\"").code == 0);
  CHECK(slurp(d1 / "search_result.json") == slurp(d2 / "search_result.json"));
  CHECK(slurp_json(d1 / "search_result.json")["evaluations"] == 25);
}

TEST_CASE("bundled reference datasets regenerate and self-check") {
  for (const std::string target :
       {"fig3", "table2", "eq10", "eq13", "transport"}) {
    const fs::path dir = fresh_dir("repro_" + target);
    const RunResult r =
        run_cli("reproduce " + target + " --out \"" + dir.string() + "\"");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "[PASS]"));
    CHECK(!contains(r.output, "[FAIL]"));
    CHECK(contains(r.output, "reproduce " + target + ": PASS"));
    const Json summary = slurp_json(dir / (target + "_summary.json"));
    CHECK(summary["pass"] == true);
  }

  const RunResult bogus = run_cli("reproduce nothing --out \"" +
                                  fresh_dir("repro_bogus").string() + "\"");
  CHECK(bogus.code == 2);
  CHECK(contains(bogus.output, "expected"));
}

TEST_CASE("the output directory environment variable is honored") {
  const fs::path dir = fresh_dir("envout");
  setenv("IONWEAVE_OUT", dir.string().c_str(), 1);
  const RunResult r =
      run_cli("couplings --config \"" + fixture("config_two_ion.json") + "\"");
  unsetenv("IONWEAVE_OUT");
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "couplings.json"));
  CHECK(fs::exists(dir / "run_report.json"));
}
