#include "gridsched/noma.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridsched {

P1Model build_p1(const Instance& inst, const NomaConfig& noma, bool drop_zero_rate) {
  std::vector<Assignment> columns;
  for (std::size_t b = 0; b < inst.block_count(); ++b) {
    for (std::size_t k = 0; k < inst.service_count(); ++k) {
      if (drop_zero_rate && inst.rate(b, k) <= 0.0) continue;
      columns.push_back({static_cast<int>(b), static_cast<int>(k), 0.0});
    }
  }
  return build_p1(inst, noma, std::move(columns));
}

P1Model build_p1(const Instance& inst, const NomaConfig& noma, std::vector<Assignment> columns) {
  if (!(noma.r_tilde >= 1.0)) throw std::invalid_argument("r_tilde must be at least 1");
  if (!std::is_sorted(columns.begin(), columns.end()) ||
      std::adjacent_find(columns.begin(), columns.end()) != columns.end()) {
    throw std::invalid_argument("P1 columns must be sorted and distinct");
  }
  P1Model model;
  LinearProgram& lp = model.lp;
  lp.sense = ObjectiveSense::Maximize;

  std::vector<std::vector<int>> columns_of_block(inst.block_count());
  std::vector<std::vector<LpTerm>> demand_terms(inst.service_count());
  for (Assignment& c : columns) {
    if (c.block_id < 0 || static_cast<std::size_t>(c.block_id) >= inst.block_count() || c.service_id < 0 ||
        static_cast<std::size_t>(c.service_id) >= inst.service_count()) {
      throw std::invalid_argument("P1 column out of range");
    }
    const auto b = static_cast<std::size_t>(c.block_id);
    const auto k = static_cast<std::size_t>(c.service_id);
    const double r = inst.rate(b, k);
    const bool urllc = inst.services.is_urllc(k);
    const int var = lp.add_variable(urllc ? 0.0 : r, 0.0, 1.0);
    c.fraction = 0.0;
    columns_of_block[b].push_back(var);
    if (urllc && r != 0.0) demand_terms[k].push_back({var, r});
  }
  model.columns = std::move(columns);

  for (int k : inst.services.urllc()) {
    const auto ku = static_cast<std::size_t>(k);
    lp.add_row(std::move(demand_terms[ku]), RowSense::GreaterEqual, inst.services[ku].q_kbps);
  }

  model.first_capacity_row = static_cast<int>(lp.num_rows());
  for (std::size_t i = 0; i < inst.conflicts.minislot_count(); ++i) {
    std::vector<LpTerm> terms;
    for (int b : inst.conflicts.blocks_on(i)) {
      for (int var : columns_of_block[static_cast<std::size_t>(b)]) terms.push_back({var, 1.0});
    }
    lp.add_row(std::move(terms), RowSense::LessEqual, noma.r_tilde);
  }
  return model;
}

P1Result solve_p1(const Instance& inst, const NomaConfig& noma, const LpOptions& options) {
  P1Result result;
  result.model = build_p1(inst, noma);
  result.lp_solution = solve_lp(result.model.lp, options);
  Schedule& s = result.schedule;
  switch (result.lp_solution.status) {
    case LpStatus::Optimal: s.status = SolveStatus::Optimal; break;
    case LpStatus::Infeasible: s.status = SolveStatus::Infeasible; break;
    case LpStatus::Unbounded:
    case LpStatus::IterationLimit:
      throw std::runtime_error("P1 solve ended with status " + to_string(result.lp_solution.status));
  }
  if (s.status == SolveStatus::Optimal) {
    for (std::size_t v = 0; v < result.model.columns.size(); ++v) {
      const double x = std::clamp(result.lp_solution.x[v], 0.0, 1.0);
      if (x <= 1e-9) continue;
      Assignment a = result.model.columns[v];
      a.fraction = x;
      s.assignments.push_back(a);
    }
  }
  finalize(inst, s);
  return result;
}

}  // namespace gridsched
