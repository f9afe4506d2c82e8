// gridsched: enumerate candidate blocks, solve one instance, or run a Monte
// Carlo scenario. Exit codes: 0 success, 1 usage/config error, 2 runtime/IO.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridsched/config.hpp"
#include "gridsched/exact.hpp"
#include "gridsched/harness.hpp"

namespace fs = std::filesystem;
using namespace gridsched;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string solver = "exact";
  std::optional<std::uint64_t> seed;
  std::string format = "text";
  std::string out;
  int jobs = 1;
  std::optional<double> time_limit_ms;
  std::optional<double> gap_tol;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_st("gridsched");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("GRIDSCHED_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    throw UsageError("GRIDSCHED_LOG must be error, info or debug, got '" + level + "'");
  }
}

Scenario load(const Options& opt) {
  Scenario scn = opt.config.empty() ? Scenario{} : load_scenario(opt.config);
  if (opt.time_limit_ms) scn.params.time_limit_ms = *opt.time_limit_ms;
  if (opt.gap_tol) scn.params.gap_tol = *opt.gap_tol;
  try {
    scn.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  spdlog::debug("scenario {}: {}x{} grid, numerology {}, {} URLLC + {} eMBB", scn.scenario_id, scn.grid.n_time,
                scn.grid.n_freq, scn.numerology.name(), scn.urllc.size(), scn.embb_count);
  return scn;
}

int cmd_enumerate(const Options& opt) {
  const Scenario scn = load(opt);
  std::size_t total = 0;
  std::string line;
  for (ShapeId s : kAllShapes) {
    const std::size_t n = placement_count(scn.grid, s);
    total += n;
    line += shape_name(s) + "=" + std::to_string(n) + " ";
  }
  std::cout << line << "total=" << total << '\n';
  return 0;
}

int cmd_solve(const Options& opt) {
  const Scenario scn = load(opt);
  const auto solver = parse_solver(opt.solver);
  if (!solver) throw UsageError("unknown solver '" + opt.solver + "'");
  if (opt.format != "text" && opt.format != "csv" && opt.format != "json") {
    throw UsageError("--format must be text, csv or json");
  }
  const std::uint64_t seed = opt.seed.value_or(scn.base_seed);
  const Instance inst = build_instance(scn, seed);
  spdlog::info("solving {} blocks x {} services with {}", inst.block_count(), inst.service_count(),
               solver_name(*solver));
  const Schedule s = run_solver(inst, *solver, scn.params);
  const ValidationReport check =
      validate_schedule(inst, s, *solver == SolverKind::P1 ? scn.params.r_tilde : 1.0);
  if (!check.ok) throw std::logic_error("schedule failed validation: " + check.violations.front());

  const std::string status = to_string(s.status);
  const std::string objective = format_number(s.objective_kbps);
  if (opt.format == "json") {
    nlohmann::json doc = {{"solver", solver_name(*solver)},
                          {"seed", seed},
                          {"status", status},
                          {"objective_kbps", s.objective_kbps},
                          {"assignments", nlohmann::json::array()}};
    for (const Assignment& a : s.assignments) {
      doc["assignments"].push_back({{"block_id", a.block_id}, {"service_id", a.service_id}, {"fraction", a.fraction}});
    }
    std::cout << doc.dump(2) << '\n';
  } else if (opt.format == "csv") {
    std::cout << "# solver=" << solver_name(*solver) << " seed=" << seed << " status=" << status
              << " objective_kbps=" << objective << '\n'
              << "block_id,service_id,fraction\n";
    for (const Assignment& a : s.assignments) {
      std::cout << a.block_id << ',' << a.service_id << ',' << format_number(a.fraction) << '\n';
    }
  } else {
    std::cout << "solver " << solver_name(*solver) << "  seed " << seed << "  status " << status
              << "  objective_kbps " << objective << '\n';
    for (const Assignment& a : s.assignments) {
      std::cout << "  block " << a.block_id << "  service " << a.service_id << "  fraction "
                << format_number(a.fraction) << '\n';
    }
  }
  return 0;
}

void write_file(const fs::path& path, const std::string& what, auto&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
  out.flush();
  if (!out) throw std::runtime_error("error writing " + what + " to " + path.string());
}

int cmd_montecarlo(const Options& opt) {
  const Scenario scn = load(opt);
  if (opt.jobs < 1) throw UsageError("--jobs must be at least 1");
  const fs::path dir = opt.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  spdlog::info("scenario {}: {} trials, roster of {}", scn.scenario_id, scn.trials, scn.roster.size());
  const int step = std::max(1, scn.trials / 10);
  const auto reports = run_scenario(scn, opt.jobs, [step](int done, int total) {
    if (done % step == 0 || done == total) spdlog::info("{}/{} trials", done, total);
  });
  const auto rows = trial_rows(scn, reports);
  const auto summary = summarize(rows);
  write_file(dir / "trials.csv", "trials", [&rows](std::ostream& o) { write_trials_csv(o, rows); });
  write_file(dir / "summary.csv", "summary", [&summary](std::ostream& o) { write_summary_csv(o, summary); });
  for (const SummaryRow& r : summary) {
    spdlog::info("{:<10} infeasible {}  mean objective {} kbps  mean gap {}%", r.solver,
                 format_number(r.infeasibility_rate), format_number(r.mean_objective_kbps),
                 format_number(r.mean_gap_pct));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conflict-aware URLLC/eMBB scheduling on a flexible-numerology grid"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Scenario JSON file (defaults built in)")->check(CLI::ExistingFile);
    sub->add_option("--time-limit-ms", opt.time_limit_ms, "Exact solver time limit");
    sub->add_option("--gap-tol", opt.gap_tol, "Exact solver relative gap tolerance");
  };

  CLI::App* enumerate = app.add_subcommand("enumerate", "Count candidate blocks per shape");
  add_common(enumerate);

  CLI::App* solve = app.add_subcommand("solve", "Solve one instance and print the schedule");
  add_common(solve);
  solve->add_option("--solver", opt.solver,
                    "exact, bruteforce, p1, baseline, ca-total, ca-avg, ca-lastpl, bpb or mbp");
  solve->add_option("--seed", opt.seed, "SNR seed (defaults to base_seed)");
  solve->add_option("--format", opt.format, "text, csv or json");

  CLI::App* montecarlo = app.add_subcommand("montecarlo", "Run every trial and write trials.csv and summary.csv");
  add_common(montecarlo);
  montecarlo->add_option("--out", opt.out, "Output directory")->required();
  montecarlo->add_option("--jobs", opt.jobs, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    setup_logging();
    if (*enumerate) return cmd_enumerate(opt);
    if (*solve) return cmd_solve(opt);
    return cmd_montecarlo(opt);
  } catch (const UsageError& e) {
    std::cerr << "gridsched: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "gridsched: config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InstanceTooLarge& e) {
    std::cerr << "gridsched: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "gridsched: " << e.what() << '\n';
    return kExitRuntime;
  }
}
