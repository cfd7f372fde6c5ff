#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

// End-to-end coverage of the command-line surface: exit codes, report files,
// CSV emission, and byte-reproducibility.

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int exit_code = -1;
  fs::path dir;
};

int counter = 0;

Run run_cli(const std::string& args) {
  Run r;
  r.dir = fs::temp_directory_path() / ("cmgkit_cli_test_" + std::to_string(counter++));
  fs::remove_all(r.dir);
  fs::create_directories(r.dir);
  const std::string cmd = std::string(CMGKIT_BIN) + " " + args + " --report-dir " +
                          r.dir.string() + " > " + (r.dir / "stdout.txt").string() +
                          " 2> " + (r.dir / "stderr.txt").string();
  const int raw = std::system(cmd.c_str());
  r.exit_code = WEXITSTATUS(raw);
  return r;
}

json load_report(const Run& r, const std::string& command) {
  std::ifstream in(r.dir / (command + "_report.json"));
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("verify-cmg on the sphere model exits 0 with a full report") {
  const Run r = run_cli("verify-cmg --space sphere --c 1 --n 3");
  CHECK(r.exit_code == 0);
  const json j = load_report(r, "verify-cmg");
  CHECK(j["results"]["is_cmg"] == true);
  CHECK(j["results"]["morse_index"] == 3);
  CHECK(j["pass"] == true);
  CHECK(j["schema"] == "cmgkit.report.v1");
  // every check names its tolerance
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("tolerance"));
    CHECK(c.contains("value"));
  }
}

TEST_CASE("verify-cmg rejects the saddle and exits 1 unless expected") {
  const Run fail = run_cli("verify-cmg --space euclidean --n 2 --germ saddle2d");
  CHECK(fail.exit_code == 1);
  const Run ok =
      run_cli("verify-cmg --space euclidean --n 2 --germ saddle2d --expect-not-cmg");
  CHECK(ok.exit_code == 0);
  CHECK(load_report(ok, "verify-cmg")["results"]["is_cmg"] == false);
}

TEST_CASE("index of the saddle germ is -1") {
  const Run r = run_cli("index --space euclidean --n 2 --germ saddle2d");
  CHECK(r.exit_code == 0);
  const json j = load_report(r, "index");
  CHECK(j["results"]["index"] == -1);
  CHECK(j["results"]["method"] == "winding_2d");
}

TEST_CASE("osc on the sphere product emits the expected CSV row") {
  const Run r = run_cli("osc --space product:s2xs2 --point 0.1,0.2,0.1,0.3");
  CHECK(r.exit_code == 0);
  const json j = load_report(r, "osc");
  CHECK(std::abs(j["results"]["osc"].get<double>() - 1.0) < 1e-6);
  const std::string csv = slurp(r.dir / "osc.csv");
  CHECK(csv.find("id,k_max,k_min,osc,refined,samples") == 0);
}

TEST_CASE("scan-schur verdicts and witness payloads") {
  const Run c = run_cli("scan-schur --space hyperbolic --n 3 --expect constant");
  CHECK(c.exit_code == 0);
  const json jc = load_report(c, "scan-schur");
  CHECK(std::abs(jc["results"]["c_mean"].get<double>() + 1.0) < 1e-6);

  const Run w = run_cli("scan-schur --space product:s2xr --expect nonconstant");
  CHECK(w.exit_code == 0);
  const json jw = load_report(w, "scan-schur");
  CHECK(jw["results"]["constant"] == false);
  CHECK(jw["results"].contains("witness"));
  const std::string csv = slurp(w.dir / "scan-schur.csv");
  CHECK(csv.find("id,k_max,k_min,osc,refined,samples") == 0);
}

TEST_CASE("sweep-qc emits the pinned CSV columns and endpoint checks") {
  const Run r = run_cli("sweep-qc --space sphere --c 1 --n 3 --eps-grid 0,0.1");
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(r.dir / "sweep-qc.csv");
  CHECK(csv.find("param,kappa_proxy,k_max,k_min,osc,refined") == 0);
  const json j = load_report(r, "sweep-qc");
  CHECK(j["results"]["rows"].size() == 2);
}

TEST_CASE("config files define named spaces; flags override scalars") {
  const fs::path cfg = fs::temp_directory_path() / "cmgkit_test_config.json";
  {
    std::ofstream out(cfg);
    out << R"({"spaces": {"round2": {"kind": "sphere", "c": 2.0, "n": 2}}})";
  }
  const Run r = run_cli("verify-cmg --config " + cfg.string() + " --space round2");
  CHECK(r.exit_code == 0);
  const json j = load_report(r, "verify-cmg");
  CHECK(std::abs(j["results"]["h_at_p"].get<double>() + 2.0) < 1e-9);
  // --c overrides the config scalar
  const Run r2 =
      run_cli("verify-cmg --config " + cfg.string() + " --space round2 --c 0.5");
  CHECK(std::abs(load_report(r2, "verify-cmg")["results"]["h_at_p"].get<double>() +
                 0.5) < 1e-9);
}

TEST_CASE("exit codes: parse errors 2, domain errors 3") {
  CHECK(run_cli("verify-cmg --space nosuchspace").exit_code == 2);
  CHECK(run_cli("verify-cmg --space euclidean --germ nosuchgerm").exit_code == 2);
  CHECK(run_cli("nosuchcommand").exit_code == 2);
  // outside the hyperbolic chart: domain error
  CHECK(run_cli("curvature --space hyperbolic --c 1 --n 2 --point 1.5,0").exit_code ==
        3);
}

TEST_CASE("the report directory env var is honored") {
  const fs::path dir = fs::temp_directory_path() / "cmgkit_envdir_test";
  fs::remove_all(dir);
  const std::string cmd = "CMGKIT_REPORT_DIR=" + dir.string() + " " + CMGKIT_BIN +
                          " index --space euclidean --n 2 --germ saddle2d" +
                          " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(fs::exists(dir / "index_report.json"));
}

TEST_CASE("reports are byte-identical across repeated runs") {
  const Run a = run_cli("verify-cmg --space sphere --c 1 --n 3 --threads 2");
  const Run b = run_cli("verify-cmg --space sphere --c 1 --n 3 --threads 1");
  CHECK(slurp(a.dir / "verify-cmg_report.json") ==
        slurp(b.dir / "verify-cmg_report.json"));

  const Run c = run_cli("osc --space product:s2xs2 --point 0.1,0.2,0.1,0.3");
  const Run d = run_cli("osc --space product:s2xs2 --point 0.1,0.2,0.1,0.3 --threads 3");
  CHECK(slurp(c.dir / "osc.csv") == slurp(d.dir / "osc.csv"));
  CHECK(slurp(c.dir / "osc_report.json") == slurp(d.dir / "osc_report.json"));
}

TEST_CASE("curvature command reports both germ formulas") {
  const Run r = run_cli("curvature --space sphere --c 2 --n 3 --point 0.15,0.05,-0.1");
  CHECK(r.exit_code == 0);
  const json j = load_report(r, "curvature");
  CHECK(std::abs(j["results"]["sectional"].get<double>() - 2.0) < 1e-8);
  CHECK(std::abs(j["results"]["via_conformal_factor"].get<double>() - 2.0) < 1e-8);
  CHECK(std::abs(j["results"]["via_third_derivative"].get<double>() - 2.0) < 1e-8);
}
