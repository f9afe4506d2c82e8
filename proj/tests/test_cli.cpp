#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("gridsched_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string("GRIDSCHED_LOG=error \"") + GRIDSCHED_CLI_PATH + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

const char* kSmall = R"({
  "schema_version": 1,
  "scenario_id": "cli",
  "grid": {"n_time": 6, "n_freq": 2},
  "services": {"urllc": [{"q_kbps": 2000, "tau_ms": 2}], "embb": {"count": 1}},
  "roster": ["exact", "bruteforce", "p1", "baseline", "ca-total", "bpb", "mbp"],
  "trials": 3,
  "base_seed": 9
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("enumerate prints the default census") {
  const auto r = run("enumerate");
  CHECK(r.code == 0);
  CHECK(r.out == "shape1=143 shape2=150 shape3=128 shape4=128 total=549\n");
}

TEST_CASE("usage and configuration errors exit with 1") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("solve --solver nope").code == 1);
  CHECK(run("montecarlo").code == 1);  // --out is required
  const auto bad = write_config("bad.json", R"({"schema_version": 1, "grdi": {}})");
  const auto r = run("solve --config \"" + bad.string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.err.find("grdi") != std::string::npos);
  const auto broken = write_config("broken.json", "{");
  CHECK(run("enumerate --config \"" + broken.string() + "\"").code == 1);
}

TEST_CASE("brute force on the default grid is refused with exit 2") {
  const auto r = run("solve --solver bruteforce");
  CHECK(r.code == 2);
  CHECK(r.err.find("too large") != std::string::npos);
}

TEST_CASE("solve formats") {
  const auto cfg = write_config("small.json", kSmall);
  const std::string base = "solve --config \"" + cfg.string() + "\" --solver exact --seed 9";
  const auto text = run(base);
  CHECK(text.code == 0);
  CHECK(text.out.rfind("solver exact  seed 9  status ", 0) == 0);
  const auto csv = run(base + " --format csv");
  CHECK(csv.code == 0);
  CHECK(csv.out.find("block_id,service_id,fraction\n") != std::string::npos);
  const auto json = run(base + " --format json");
  CHECK(json.code == 0);
  CHECK(json.out.find("\"objective_kbps\"") != std::string::npos);
  CHECK(run(base + " --format xml").code == 1);
}

TEST_CASE("montecarlo writes reproducible files") {
  const auto cfg = write_config("mc.json", kSmall);
  const fs::path a = scratch() / "a";
  const fs::path b = scratch() / "b";
  REQUIRE(run("montecarlo --config \"" + cfg.string() + "\" --out \"" + a.string() + "\"").code == 0);
  REQUIRE(run("montecarlo --config \"" + cfg.string() + "\" --jobs 2 --out \"" + b.string() + "\"").code == 0);
  const std::string trials = slurp(a / "trials.csv");
  CHECK(trials.rfind("# gridsched trials v1\n", 0) == 0);
  CHECK(slurp(a / "summary.csv").rfind("# gridsched summary v1\n", 0) == 0);
  CHECK(trials == slurp(b / "trials.csv"));
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  // Header line plus column line plus one row per trial and solver.
  CHECK(std::count(trials.begin(), trials.end(), '\n') == 2 + 3 * 7);
  CHECK(run("montecarlo --jobs 0 --out \"" + a.string() + "\"").code == 1);
}

}
