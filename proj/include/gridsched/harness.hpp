#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridsched/channel.hpp"
#include "gridsched/grid.hpp"
#include "gridsched/heuristics.hpp"
#include "gridsched/problem.hpp"

namespace gridsched {

enum class NumerologyMode : std::uint8_t { Fixed, MultipleFixed, Flexible };

// Which block shapes each service class may use. MultipleFixed gives eMBB the
// horizontal Shape1 and URLLC the vertical Shape3.
struct Numerology {
  NumerologyMode mode = NumerologyMode::Flexible;
  ShapeId fixed_shape = ShapeId::Shape1;

  static Numerology flexible() { return {}; }
  static Numerology multiple_fixed() { return {NumerologyMode::MultipleFixed, ShapeId::Shape1}; }
  static Numerology fixed(ShapeId s) { return {NumerologyMode::Fixed, s}; }

  // Shapes enumerated on the grid: the union over service classes.
  std::vector<ShapeId> shapes() const;
  bool allows(ShapeId shape, ServiceClass cls) const;
  // "flexible", "multiple_fixed", "fixed_shape1", ...
  std::string name() const;
};

std::optional<Numerology> parse_numerology(std::string_view name);

enum class SolverKind : std::uint8_t { Exact, Bruteforce, P1, Baseline, CaTotal, CaAvg, CaLastPl, Bpb, Mbp };

inline constexpr SolverKind kAllSolvers[] = {
    SolverKind::Exact,   SolverKind::Bruteforce, SolverKind::P1,  SolverKind::Baseline, SolverKind::CaTotal,
    SolverKind::CaAvg,   SolverKind::CaLastPl,   SolverKind::Bpb, SolverKind::Mbp};

// "exact", "bruteforce", "p1", "baseline", "ca-total", "ca-avg", "ca-lastpl", "bpb", "mbp"
std::string solver_name(SolverKind s);
std::optional<SolverKind> parse_solver(std::string_view name);
bool is_heuristic(SolverKind s);

enum class ExactMode : std::uint8_t { Full, Reduced, Skip };
std::string to_string(ExactMode m);
std::optional<ExactMode> parse_exact_mode(std::string_view name);

struct SolverParams {
  double r_tilde = 1.0;
  double time_limit_ms = 60'000.0;
  double gap_tol = 0.0;
  int bpb_h = 0;  // 0: derived from the instance
  double mbp_delta = 0.5;
  bool literal_loss = false;
  long lp_max_iterations = 1'000'000;
  ExactMode exact_mode = ExactMode::Full;
  int exact_trials = 10;  // trials that run exact solvers under Reduced
};

struct Scenario {
  std::string scenario_id = "default";
  GridSpec grid;
  Numerology numerology;
  std::vector<UrllcParams> urllc{{64, 1}, {64, 1}, {64, 1}, {64, 1}, {64, 1}};
  int embb_count = 5;
  double embb_tau_ms = 2.0;
  SnrRange snr;
  ThroughputModel model;
  int trials = 100;
  std::uint64_t base_seed = 1;
  std::vector<SolverKind> roster{SolverKind::Exact,   SolverKind::P1,       SolverKind::Baseline,
                                 SolverKind::CaTotal, SolverKind::CaAvg,    SolverKind::CaLastPl,
                                 SolverKind::Bpb,     SolverKind::Mbp};
  SolverParams params;
  bool record_timing = false;

  // Throws std::invalid_argument describing the first bad field.
  void validate() const;
  ServiceSet services() const;
};

// Instance for one SNR realization. Disallowed shape/service pairs get rate 0.
Instance build_instance(const Scenario& scn, std::uint64_t seed);

// Runs one solver. Bruteforce may throw InstanceTooLarge.
Schedule run_solver(const Instance& inst, SolverKind solver, const SolverParams& params);

struct SolverRun {
  SolverKind solver = SolverKind::Exact;
  Schedule schedule;
  double time_ms = 0.0;
  std::optional<double> gap_pct;
  std::optional<double> noma_gap_pct;
};

struct TrialReport {
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<SolverRun> runs;  // roster order; exact solvers absent when skipped
};

// 100 (exact - heur) / exact; missing unless exact > 0.
std::optional<double> optimality_gap(double exact_obj, double heur_obj);
// 100 (noma - oma) / noma; missing unless noma > 0.
std::optional<double> noma_gap(double noma_obj, double oma_obj);

// Builds the instance for seed = base_seed + trial, runs the roster, validates
// every schedule (throws std::logic_error on any violation) and fills gaps.
TrialReport run_trial(const Scenario& scn, int trial);

using ProgressFn = std::function<void(int done, int total)>;

// All trials, run on `jobs` threads and returned in trial order.
std::vector<TrialReport> run_scenario(const Scenario& scn, int jobs = 1, const ProgressFn& progress = {});

// One line of the per-trial CSV.
struct TrialRow {
  std::string scenario_id;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string solver;
  std::string status;
  std::optional<double> objective_kbps;
  std::optional<double> gap_pct;
  std::optional<double> noma_gap_pct;
  std::optional<double> time_ms;

  friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

// Objective is missing when the run produced no schedule; time only when
// record_timing is set, so untimed files are byte-reproducible.
std::vector<TrialRow> trial_rows(const Scenario& scn, const std::vector<TrialReport>& reports);

struct SummaryRow {
  std::string scenario_id;
  std::string solver;
  int runs = 0;
  int feasible = 0;
  std::optional<double> infeasibility_rate;
  std::optional<double> mean_objective_kbps;
  std::optional<double> std_objective_kbps;  // population
  std::optional<double> mean_gap_pct;
  int gap_count = 0;
  std::optional<double> mean_noma_gap_pct;
  int noma_gap_count = 0;
  std::optional<double> mean_time_ms;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

// Per (scenario, solver) in order of first appearance, accumulating rows in
// the order given. Infeasible runs are excluded from objective statistics and
// time-limited runs without a schedule from the infeasibility denominator.
std::vector<SummaryRow> summarize(const std::vector<TrialRow>& rows);

inline constexpr std::string_view kTrialsHeader = "# gridsched trials v1";
inline constexpr std::string_view kSummaryHeader = "# gridsched summary v1";

// Shortest round-trip decimal form; "NA" when missing.
std::string format_number(std::optional<double> v);

void write_trials_csv(std::ostream& out, const std::vector<TrialRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
// Throws std::runtime_error on a malformed file.
std::vector<TrialRow> read_trials_csv(std::istream& in);

}  // namespace gridsched
