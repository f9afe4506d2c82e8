#include "gridsched/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gridsched/exact.hpp"
#include "gridsched/noma.hpp"

namespace gridsched {

std::vector<ShapeId> Numerology::shapes() const {
  switch (mode) {
    case NumerologyMode::Fixed: return {fixed_shape};
    case NumerologyMode::MultipleFixed: return {ShapeId::Shape1, ShapeId::Shape3};
    case NumerologyMode::Flexible: break;
  }
  return {kAllShapes.begin(), kAllShapes.end()};
}

bool Numerology::allows(ShapeId shape, ServiceClass cls) const {
  switch (mode) {
    case NumerologyMode::Fixed: return shape == fixed_shape;
    case NumerologyMode::MultipleFixed:
      return shape == (cls == ServiceClass::Embb ? ShapeId::Shape1 : ShapeId::Shape3);
    case NumerologyMode::Flexible: break;
  }
  return true;
}

std::string Numerology::name() const {
  switch (mode) {
    case NumerologyMode::Fixed: return "fixed_" + shape_name(fixed_shape);
    case NumerologyMode::MultipleFixed: return "multiple_fixed";
    case NumerologyMode::Flexible: break;
  }
  return "flexible";
}

std::optional<Numerology> parse_numerology(std::string_view name) {
  if (name == "flexible") return Numerology::flexible();
  if (name == "multiple_fixed") return Numerology::multiple_fixed();
  for (ShapeId s : kAllShapes) {
    if (name == "fixed_" + shape_name(s)) return Numerology::fixed(s);
  }
  return std::nullopt;
}

std::string solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::Exact: return "exact";
    case SolverKind::Bruteforce: return "bruteforce";
    case SolverKind::P1: return "p1";
    case SolverKind::Baseline: return "baseline";
    case SolverKind::CaTotal: return "ca-total";
    case SolverKind::CaAvg: return "ca-avg";
    case SolverKind::CaLastPl: return "ca-lastpl";
    case SolverKind::Bpb: return "bpb";
    case SolverKind::Mbp: return "mbp";
  }
  return "unknown";
}

std::optional<SolverKind> parse_solver(std::string_view name) {
  for (SolverKind s : kAllSolvers) {
    if (name == solver_name(s)) return s;
  }
  return std::nullopt;
}

bool is_heuristic(SolverKind s) {
  return s != SolverKind::Exact && s != SolverKind::Bruteforce && s != SolverKind::P1;
}

namespace {

bool is_exact(SolverKind s) { return s == SolverKind::Exact || s == SolverKind::Bruteforce; }

}  // namespace

std::string to_string(ExactMode m) {
  switch (m) {
    case ExactMode::Full: return "full";
    case ExactMode::Reduced: return "reduced";
    case ExactMode::Skip: return "skip";
  }
  return "unknown";
}

std::optional<ExactMode> parse_exact_mode(std::string_view name) {
  for (ExactMode m : {ExactMode::Full, ExactMode::Reduced, ExactMode::Skip}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

void Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (scenario_id.empty() || scenario_id.find_first_of(",\n\r\"") != std::string::npos) {
    fail("scenario_id must be non-empty and free of commas, quotes and newlines");
  }
  grid.validate();
  model.validate();
  (void)services();
  if (!(snr.lo_db < snr.hi_db)) fail("snr_db_min must be below snr_db_max");
  if (trials < 1) fail("trials must be at least 1");
  if (roster.empty()) fail("roster must name at least one solver");
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (std::find(roster.begin(), roster.begin() + static_cast<std::ptrdiff_t>(i), roster[i]) !=
        roster.begin() + static_cast<std::ptrdiff_t>(i)) {
      fail("roster lists " + solver_name(roster[i]) + " twice");
    }
  }
  if (!(params.r_tilde >= 1.0)) fail("r_tilde must be at least 1");
  if (!(params.time_limit_ms > 0.0)) fail("time_limit_ms must be positive");
  if (!(params.gap_tol >= 0.0)) fail("gap_tol must be non-negative");
  if (params.bpb_h < 0) fail("bpb_h must be non-negative");
  if (!(params.mbp_delta > 0.0 && params.mbp_delta < 1.0)) fail("mbp_delta must lie in (0, 1)");
  if (params.lp_max_iterations < 1) fail("lp_max_iterations must be positive");
  if (params.exact_trials < 0) fail("exact_trials must be non-negative");
}

ServiceSet Scenario::services() const { return ServiceSet(urllc, embb_count, embb_tau_ms); }

Instance build_instance(const Scenario& scn, std::uint64_t seed) {
  const std::vector<ShapeId> shapes = scn.numerology.shapes();
  std::vector<Block> blocks = enumerate_blocks(scn.grid, shapes);
  ServiceSet services = scn.services();
  const SnrRealization snr = sample_snr(services, scn.grid, scn.snr, seed);
  ThroughputMatrix tp = throughput_matrix(snr, blocks, services, scn.grid, scn.model);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t k = 0; k < services.size(); ++k) {
      if (!scn.numerology.allows(blocks[b].shape, services[k].cls)) tp.at(b, k) = 0.0;
    }
  }
  return make_instance(scn.grid, std::move(blocks), std::move(tp), std::move(services));
}

Schedule run_solver(const Instance& inst, SolverKind solver, const SolverParams& params) {
  LpOptions lp;
  lp.max_iterations = params.lp_max_iterations;
  switch (solver) {
    case SolverKind::Exact: {
      BnbOptions opts;
      opts.time_limit_ms = params.time_limit_ms;
      opts.gap_tol = params.gap_tol;
      opts.lp = lp;
      // Start from the best demand-feasible greedy schedule.
      for (const Schedule& s : {run_ca(inst, UtilityVariant::Total), run_ca(inst, UtilityVariant::Baseline),
                                run_bpb(inst)}) {
        if (s.status == SolveStatus::Feasible &&
            (!opts.initial_incumbent || s.objective_kbps > opts.initial_incumbent->objective_kbps)) {
          opts.initial_incumbent = s;
        }
      }
      return solve_p0_bnb(inst, opts);
    }
    case SolverKind::Bruteforce: return solve_p0_bruteforce(inst);
    case SolverKind::P1: return solve_p1(inst, NomaConfig{params.r_tilde}, lp).schedule;
    case SolverKind::Baseline: return run_ca(inst, UtilityVariant::Baseline);
    case SolverKind::CaTotal: return run_ca(inst, UtilityVariant::Total);
    case SolverKind::CaAvg: return run_ca(inst, UtilityVariant::Avg);
    case SolverKind::CaLastPl: return run_ca(inst, UtilityVariant::LastPl);
    case SolverKind::Bpb: {
      BpbOptions opts;
      opts.h = params.bpb_h;
      opts.loss = params.literal_loss ? LossMetric::AggregatedLiteral : LossMetric::Aggregated;
      return run_bpb(inst, opts);
    }
    case SolverKind::Mbp: return run_mbp(inst, MbpOptions{params.bpb_h, params.mbp_delta, params.literal_loss});
  }
  throw std::invalid_argument("unknown solver");
}

std::optional<double> optimality_gap(double exact_obj, double heur_obj) {
  if (!(exact_obj > 0.0)) return std::nullopt;
  return 100.0 * (exact_obj - heur_obj) / exact_obj;
}

std::optional<double> noma_gap(double noma_obj, double oma_obj) {
  if (!(noma_obj > 0.0)) return std::nullopt;
  return 100.0 * (noma_obj - oma_obj) / noma_obj;
}

TrialReport run_trial(const Scenario& scn, int trial) {
  TrialReport report;
  report.trial = trial;
  report.seed = scn.base_seed + static_cast<std::uint64_t>(trial);
  const Instance inst = build_instance(scn, report.seed);

  const bool exact_enabled = scn.params.exact_mode == ExactMode::Full ||
                             (scn.params.exact_mode == ExactMode::Reduced && trial < scn.params.exact_trials);
  for (SolverKind solver : scn.roster) {
    if (is_exact(solver) && !exact_enabled) continue;
    SolverRun run;
    run.solver = solver;
    const auto start = std::chrono::steady_clock::now();
    run.schedule = run_solver(inst, solver, scn.params);
    run.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    const double capacity = solver == SolverKind::P1 ? scn.params.r_tilde : 1.0;
    const ValidationReport check = validate_schedule(inst, run.schedule, capacity);
    if (!check.ok) {
      std::string msg = "schedule from " + solver_name(solver) + " failed validation on trial " +
                        std::to_string(trial) + ":";
      for (const std::string& v : check.violations) msg += "\n  " + v;
      throw std::logic_error(msg);
    }
    report.runs.push_back(std::move(run));
  }

  auto find = [&report](SolverKind s) -> const SolverRun* {
    for (const SolverRun& r : report.runs) {
      if (r.solver == s) return &r;
    }
    return nullptr;
  };
  const SolverRun* reference = find(SolverKind::Exact);
  if (!reference || reference->schedule.status != SolveStatus::Optimal) reference = find(SolverKind::Bruteforce);
  if (reference && reference->schedule.status != SolveStatus::Optimal) reference = nullptr;
  const SolverRun* noma = find(SolverKind::P1);
  if (noma && noma->schedule.status != SolveStatus::Optimal) noma = nullptr;

  for (SolverRun& run : report.runs) {
    const Schedule& s = run.schedule;
    const bool usable = s.has_solution() && s.demands_met();
    if (!usable) continue;
    if (reference && is_heuristic(run.solver)) {
      run.gap_pct = optimality_gap(reference->schedule.objective_kbps, s.objective_kbps);
    }
    if (noma && run.solver != SolverKind::P1) {
      run.noma_gap_pct = noma_gap(noma->schedule.objective_kbps, s.objective_kbps);
    }
  }
  return report;
}

std::vector<TrialReport> run_scenario(const Scenario& scn, int jobs, const ProgressFn& progress) {
  scn.validate();
  const int total = scn.trials;
  std::vector<std::optional<TrialReport>> slots(static_cast<std::size_t>(total));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(total));
  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= total) return;
      try {
        slots[static_cast<std::size_t>(t)] = run_trial(scn, t);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
        next.store(total);
      }
      const int finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, total);
      }
    }
  };

  const int n_threads = std::clamp(jobs, 1, total);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<TrialReport> reports;
  reports.reserve(slots.size());
  for (auto& s : slots) reports.push_back(std::move(*s));
  return reports;
}

std::vector<TrialRow> trial_rows(const Scenario& scn, const std::vector<TrialReport>& reports) {
  std::vector<TrialRow> rows;
  for (const TrialReport& rep : reports) {
    for (const SolverRun& run : rep.runs) {
      TrialRow row;
      row.scenario_id = scn.scenario_id;
      row.trial = rep.trial;
      row.seed = rep.seed;
      row.solver = solver_name(run.solver);
      row.status = to_string(run.schedule.status);
      if (run.schedule.status != SolveStatus::TimeLimit || run.schedule.has_solution()) {
        row.objective_kbps = run.schedule.objective_kbps;
      }
      row.gap_pct = run.gap_pct;
      row.noma_gap_pct = run.noma_gap_pct;
      if (scn.record_timing) row.time_ms = run.time_ms;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

struct Accumulator {
  SummaryRow row;
  int infeasible = 0;
  int unresolved = 0;  // time limit without a schedule
  std::vector<double> objectives;
  double gap_sum = 0.0;
  double noma_sum = 0.0;
  double time_sum = 0.0;
  int time_count = 0;
};

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<TrialRow>& rows) {
  std::vector<Accumulator> acc;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const TrialRow& r : rows) {
    auto [it, inserted] = index.try_emplace({r.scenario_id, r.solver}, acc.size());
    if (inserted) {
      acc.emplace_back();
      acc.back().row.scenario_id = r.scenario_id;
      acc.back().row.solver = r.solver;
    }
    Accumulator& a = acc[it->second];
    ++a.row.runs;
    const bool infeasible = r.status == "infeasible";
    if (infeasible) {
      ++a.infeasible;
    } else if (r.objective_kbps) {
      ++a.row.feasible;
      a.objectives.push_back(*r.objective_kbps);
    } else {
      ++a.unresolved;
    }
    if (r.gap_pct) {
      a.gap_sum += *r.gap_pct;
      ++a.row.gap_count;
    }
    if (r.noma_gap_pct) {
      a.noma_sum += *r.noma_gap_pct;
      ++a.row.noma_gap_count;
    }
    if (r.time_ms) {
      a.time_sum += *r.time_ms;
      ++a.time_count;
    }
  }

  std::vector<SummaryRow> out;
  for (Accumulator& a : acc) {
    SummaryRow& s = a.row;
    const int decided = s.runs - a.unresolved;
    if (decided > 0) s.infeasibility_rate = static_cast<double>(a.infeasible) / decided;
    if (!a.objectives.empty()) {
      double sum = 0.0;
      for (double x : a.objectives) sum += x;
      const double mean = sum / static_cast<double>(a.objectives.size());
      double ss = 0.0;
      for (double x : a.objectives) ss += (x - mean) * (x - mean);
      s.mean_objective_kbps = mean;
      s.std_objective_kbps = std::sqrt(ss / static_cast<double>(a.objectives.size()));
    }
    if (s.gap_count > 0) s.mean_gap_pct = a.gap_sum / s.gap_count;
    if (s.noma_gap_count > 0) s.mean_noma_gap_pct = a.noma_sum / s.noma_gap_count;
    if (a.time_count > 0) s.mean_time_ms = a.time_sum / a.time_count;
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_number(std::optional<double> v) {
  if (!v) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, *v);
  return std::string(buf, res.ptr);
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRow>& rows) {
  out << kTrialsHeader << '\n'
      << "scenario_id,trial,seed,solver,status,objective_kbps,gap_pct,noma_gap_pct,time_ms\n";
  for (const TrialRow& r : rows) {
    out << r.scenario_id << ',' << r.trial << ',' << r.seed << ',' << r.solver << ',' << r.status << ','
        << format_number(r.objective_kbps) << ',' << format_number(r.gap_pct) << ','
        << format_number(r.noma_gap_pct) << ',' << format_number(r.time_ms) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n'
      << "scenario_id,solver,runs,feasible,infeasibility_rate,mean_objective_kbps,std_objective_kbps,"
         "mean_gap_pct,gap_count,mean_noma_gap_pct,noma_gap_count,mean_time_ms\n";
  for (const SummaryRow& r : rows) {
    out << r.scenario_id << ',' << r.solver << ',' << r.runs << ',' << r.feasible << ','
        << format_number(r.infeasibility_rate) << ',' << format_number(r.mean_objective_kbps) << ','
        << format_number(r.std_objective_kbps) << ',' << format_number(r.mean_gap_pct) << ',' << r.gap_count
        << ',' << format_number(r.mean_noma_gap_pct) << ',' << r.noma_gap_count << ','
        << format_number(r.mean_time_ms) << '\n';
  }
}

namespace {

template <typename T>
T parse_field(std::string_view s, int line) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::optional<double> parse_optional(std::string_view s, int line) {
  if (s == "NA") return std::nullopt;
  return parse_field<double>(s, line);
}

}  // namespace

std::vector<TrialRow> read_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrialsHeader) {
    throw std::runtime_error("missing '" + std::string(kTrialsHeader) + "' header");
  }
  if (!std::getline(in, line) || line.rfind("scenario_id,", 0) != 0) throw std::runtime_error("missing column header");
  std::vector<TrialRow> rows;
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 9) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 9 fields, got " +
                               std::to_string(f.size()));
    }
    TrialRow r;
    r.scenario_id = f[0];
    r.trial = parse_field<int>(f[1], line_no);
    r.seed = parse_field<std::uint64_t>(f[2], line_no);
    r.solver = f[3];
    r.status = f[4];
    r.objective_kbps = parse_optional(f[5], line_no);
    r.gap_pct = parse_optional(f[6], line_no);
    r.noma_gap_pct = parse_optional(f[7], line_no);
    r.time_ms = parse_optional(f[8], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace gridsched
