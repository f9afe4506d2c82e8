#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "gridsched/config.hpp"
#include "gridsched/exact.hpp"
#include "json.hpp"

using namespace gridsched;

namespace {

Scenario quick(int trials) {
  Scenario scn = fixture::small(6, 2, {{2000, 2}, {3000, 1}}, 2);
  scn.trials = trials;
  scn.base_seed = 40;
  scn.roster = {SolverKind::Exact, SolverKind::Bruteforce, SolverKind::P1, SolverKind::Baseline,
                SolverKind::CaTotal, SolverKind::Bpb, SolverKind::Mbp};
  return scn;
}

TrialRow row(std::string solver, std::string status, std::optional<double> obj, std::optional<double> gap = {}) {
  TrialRow r;
  r.scenario_id = "s";
  r.solver = std::move(solver);
  r.status = std::move(status);
  r.objective_kbps = obj;
  r.gap_pct = gap;
  return r;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("gap arithmetic") {
  CHECK(*optimality_gap(200, 180) == doctest::Approx(10.0));
  CHECK(*noma_gap(100, 80) == doctest::Approx(20.0));
  CHECK_FALSE(optimality_gap(0, 0).has_value());
  CHECK_FALSE(noma_gap(0, 5).has_value());
}

TEST_CASE("numerology modes") {
  const auto flex = Numerology::flexible();
  CHECK(flex.shapes().size() == 4);
  CHECK(flex.allows(ShapeId::Shape2, ServiceClass::Urllc));
  const auto multi = Numerology::multiple_fixed();
  CHECK(multi.shapes() == std::vector<ShapeId>{ShapeId::Shape1, ShapeId::Shape3});
  CHECK(multi.allows(ShapeId::Shape1, ServiceClass::Embb));
  CHECK_FALSE(multi.allows(ShapeId::Shape3, ServiceClass::Embb));
  CHECK(multi.allows(ShapeId::Shape3, ServiceClass::Urllc));
  CHECK_FALSE(multi.allows(ShapeId::Shape1, ServiceClass::Urllc));
  const auto fixed = Numerology::fixed(ShapeId::Shape2);
  CHECK(fixed.shapes() == std::vector<ShapeId>{ShapeId::Shape2});
  for (const char* name : {"flexible", "multiple_fixed", "fixed_shape1", "fixed_shape4"}) {
    const auto n = parse_numerology(name);
    REQUIRE(n.has_value());
    CHECK(n->name() == name);
  }
  CHECK_FALSE(parse_numerology("fixed_shape5").has_value());

  Scenario scn = fixture::small(8, 4, {{64, 2}}, 1);
  scn.numerology = multi;
  const Instance inst = build_instance(scn, 3);
  for (const Block& b : inst.blocks) {
    const auto id = static_cast<std::size_t>(b.block_id);
    CHECK((inst.rate(id, 0) > 0) == (b.shape == ShapeId::Shape3));
    CHECK((inst.rate(id, 1) > 0) == (b.shape == ShapeId::Shape1));
  }
}

TEST_CASE("solver names round trip") {
  for (SolverKind s : kAllSolvers) CHECK(parse_solver(solver_name(s)) == s);
  CHECK_FALSE(parse_solver("simplex").has_value());
  CHECK(is_heuristic(SolverKind::Bpb));
  CHECK_FALSE(is_heuristic(SolverKind::P1));
}

TEST_CASE("trials are reproducible and independent of threading") {
  const Scenario scn = quick(6);
  const auto a = trial_rows(scn, run_scenario(scn, 1));
  const auto b = trial_rows(scn, run_scenario(scn, 1));
  const auto c = trial_rows(scn, run_scenario(scn, 3));
  CHECK(a == b);
  CHECK(a == c);
  REQUIRE(a.size() == 6 * scn.roster.size());
  CHECK(a.front().seed == 40);
  CHECK(a.back().seed == 45);
}

TEST_CASE("trial reports carry consistent gaps") {
  const Scenario scn = quick(5);
  for (const TrialReport& rep : run_scenario(scn)) {
    const SolverRun& ex = rep.runs[0];
    const SolverRun& bf = rep.runs[1];
    const SolverRun& p1 = rep.runs[2];
    REQUIRE(ex.solver == SolverKind::Exact);
    CHECK(ex.schedule.status == bf.schedule.status);
    if (ex.schedule.status != SolveStatus::Optimal) continue;
    CHECK(p1.schedule.objective_kbps >= ex.schedule.objective_kbps - 1e-6);
    for (const SolverRun& r : rep.runs) {
      if (!is_heuristic(r.solver)) continue;
      if (!r.schedule.demands_met()) {
        CHECK_FALSE(r.gap_pct.has_value());
        continue;
      }
      REQUIRE(r.gap_pct.has_value());
      CHECK(*r.gap_pct == doctest::Approx(*optimality_gap(ex.schedule.objective_kbps, r.schedule.objective_kbps)));
      CHECK(*r.gap_pct >= -1e-9);
    }
  }
}

TEST_CASE("exact modes") {
  Scenario scn = quick(4);
  scn.params.exact_mode = ExactMode::Skip;
  for (const TrialReport& rep : run_scenario(scn)) {
    for (const SolverRun& r : rep.runs) CHECK((r.solver != SolverKind::Exact && r.solver != SolverKind::Bruteforce));
  }
  scn.params.exact_mode = ExactMode::Reduced;
  scn.params.exact_trials = 2;
  const auto reps = run_scenario(scn);
  CHECK(reps[0].runs.size() == scn.roster.size());
  CHECK(reps[1].runs.size() == scn.roster.size());
  CHECK(reps[2].runs.size() == scn.roster.size() - 2);
}

TEST_CASE("CSV round trip preserves the summary") {
  Scenario scn = quick(4);
  scn.record_timing = true;
  const auto rows = trial_rows(scn, run_scenario(scn));
  std::stringstream buf;
  write_trials_csv(buf, rows);
  CHECK(buf.str().rfind(std::string(kTrialsHeader), 0) == 0);
  const auto back = read_trials_csv(buf);
  CHECK(back == rows);
  CHECK(summarize(back) == summarize(rows));

  std::stringstream bad("# gridsched trials v1\nscenario_id,trial\nx,1\n");
  CHECK_THROWS_AS(read_trials_csv(bad), std::runtime_error);
}

TEST_CASE("untimed rows leave time empty") {
  const Scenario scn = quick(1);
  for (const TrialRow& r : trial_rows(scn, run_scenario(scn))) CHECK_FALSE(r.time_ms.has_value());
}

TEST_CASE("number formatting") {
  CHECK(format_number(std::nullopt) == "NA");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(250.0) == "250");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("summary statistics by hand") {
  const std::vector<TrialRow> rows{
      row("h", "feasible", 10.0, 5.0), row("h", "feasible", 20.0, 15.0), row("h", "infeasible", 3.0),
      row("h", "time_limit", std::nullopt), row("e", "optimal", 7.0),
  };
  const auto sum = summarize(rows);
  REQUIRE(sum.size() == 2);
  const SummaryRow& h = sum[0];
  CHECK(h.solver == "h");
  CHECK(h.runs == 4);
  CHECK(h.feasible == 2);
  CHECK(*h.infeasibility_rate == doctest::Approx(1.0 / 3.0));
  CHECK(*h.mean_objective_kbps == doctest::Approx(15.0));
  CHECK(*h.std_objective_kbps == doctest::Approx(5.0));
  CHECK(*h.mean_gap_pct == doctest::Approx(10.0));
  CHECK(h.gap_count == 2);
  CHECK_FALSE(h.mean_time_ms.has_value());
  const SummaryRow& e = sum[1];
  CHECK(*e.std_objective_kbps == 0.0);
  CHECK(*e.infeasibility_rate == 0.0);
  CHECK_FALSE(e.mean_gap_pct.has_value());
}

TEST_CASE("exact infeasibility grows with demand") {
  double prev = 0.0;
  for (double q : {1000.0, 3000.0, 6000.0, 10000.0}) {
    Scenario scn = fixture::small(6, 2, {{q, 2}}, 1);
    scn.trials = 12;
    scn.roster = {SolverKind::Exact};
    const auto sum = summarize(trial_rows(scn, run_scenario(scn)));
    CHECK(*sum[0].infeasibility_rate >= prev);
    prev = *sum[0].infeasibility_rate;
  }
  CHECK(prev > 0.0);
}

TEST_CASE("scenario validation") {
  Scenario scn;
  CHECK_NOTHROW(scn.validate());
  scn.trials = 0;
  CHECK_THROWS_AS(scn.validate(), std::invalid_argument);
  scn = Scenario{};
  scn.roster = {SolverKind::Bpb, SolverKind::Bpb};
  CHECK_THROWS_AS(scn.validate(), std::invalid_argument);
  scn = Scenario{};
  scn.scenario_id = "a,b";
  CHECK_THROWS_AS(scn.validate(), std::invalid_argument);
}

TEST_CASE("config parsing") {
  const Scenario def = parse_scenario(R"({"schema_version": 1})");
  CHECK(scenario_to_json(def) == scenario_to_json(Scenario{}));

  const Scenario scn = parse_scenario(R"({
    "schema_version": 1,
    "scenario_id": "tight",
    "grid": {"n_time": 8, "n_freq": 6},
    "numerology": "multiple_fixed",
    "services": {"urllc": [{"q_kbps": 128, "tau_ms": 0.5}], "embb": {"count": 3}},
    "solver": {"exact_mode": "reduced", "loss_metric": "aggregated_literal"},
    "roster": ["bpb", "mbp"],
    "trials": 7
  })");
  CHECK(scn.scenario_id == "tight");
  CHECK(scn.grid.n_time == 8);
  CHECK(scn.grid.window_ms == 2.0);
  CHECK(scn.numerology.mode == NumerologyMode::MultipleFixed);
  REQUIRE(scn.urllc.size() == 1);
  CHECK(scn.urllc[0].tau_ms == 0.5);
  CHECK(scn.embb_count == 3);
  CHECK(scn.params.exact_mode == ExactMode::Reduced);
  CHECK(scn.params.literal_loss);
  CHECK(scn.roster == std::vector<SolverKind>{SolverKind::Bpb, SolverKind::Mbp});
  CHECK(scenario_to_json(parse_scenario(scenario_to_json(scn))) == scenario_to_json(scn));

  CHECK_THROWS_AS(parse_scenario("{}"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 1, "gird": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 1, "grid": {"n_time": 8, "nfreq": 2}})"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 1, "trials": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"schema_version": 1, "roster": ["cplex"]})"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("{not json"), ConfigError);
}

}
