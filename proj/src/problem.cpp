#include "gridsched/problem.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace gridsched {

void Instance::validate() const {
  grid.validate();
  if (conflicts.block_count() != blocks.size() || throughput.block_count() != blocks.size()) {
    throw std::invalid_argument("instance block dimensions disagree");
  }
  if (throughput.service_count() != services.size()) {
    throw std::invalid_argument("instance service dimensions disagree");
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].block_id != static_cast<int>(b)) throw std::invalid_argument("block ids must be dense");
    for (std::size_t k = 0; k < services.size(); ++k) {
      const double r = throughput.at(b, k);
      if (!std::isfinite(r) || r < 0.0) throw std::invalid_argument("throughput must be finite and non-negative");
    }
  }
}

Instance make_instance(const GridSpec& grid, std::vector<Block> blocks, ThroughputMatrix throughput,
                       ServiceSet services) {
  Instance inst;
  inst.grid = grid;
  inst.conflicts = build_conflicts(blocks, grid);
  inst.blocks = std::move(blocks);
  inst.throughput = std::move(throughput);
  inst.services = std::move(services);
  inst.validate();
  return inst;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

void finalize(const Instance& inst, Schedule& schedule) {
  std::sort(schedule.assignments.begin(), schedule.assignments.end());
  schedule.delivered_kbps.assign(inst.service_count(), 0.0);
  schedule.objective_kbps = 0.0;
  for (const Assignment& a : schedule.assignments) {
    const auto b = static_cast<std::size_t>(a.block_id);
    const auto k = static_cast<std::size_t>(a.service_id);
    const double v = inst.rate(b, k) * a.fraction;
    schedule.delivered_kbps[k] += v;
    if (!inst.services.is_urllc(k)) schedule.objective_kbps += v;
  }
  schedule.unmet_services.clear();
  for (int k : inst.services.urllc()) {
    const auto ku = static_cast<std::size_t>(k);
    if (schedule.delivered_kbps[ku] < inst.services[ku].q_kbps - kDemandTolKbps) {
      schedule.unmet_services.push_back(k);
    }
  }
}

ValidationReport validate_schedule(const Instance& inst, const Schedule& schedule, double capacity) {
  ValidationReport report;
  auto fail = [&report](std::string msg) {
    report.ok = false;
    report.violations.push_back(std::move(msg));
  };
  const std::size_t n_blocks = inst.blocks.size();
  const std::size_t n_services = inst.services.size();
  constexpr double kTol = 1e-9;

  std::vector<double> load(static_cast<std::size_t>(inst.grid.minislot_count()), 0.0);
  std::vector<double> delivered(n_services, 0.0);
  std::set<std::pair<int, int>> seen;
  for (const Assignment& a : schedule.assignments) {
    if (a.block_id < 0 || static_cast<std::size_t>(a.block_id) >= n_blocks || a.service_id < 0 ||
        static_cast<std::size_t>(a.service_id) >= n_services) {
      fail("assignment references an unknown block or service");
      continue;
    }
    if (!(a.fraction >= -kTol && a.fraction <= 1.0 + kTol)) {
      fail("fraction outside [0, 1] for block " + std::to_string(a.block_id));
    }
    if (!seen.insert({a.block_id, a.service_id}).second) {
      fail("duplicate assignment of block " + std::to_string(a.block_id) + " to service " +
           std::to_string(a.service_id));
    }
    for (int slot : inst.blocks[static_cast<std::size_t>(a.block_id)].minislots) {
      load[static_cast<std::size_t>(slot)] += a.fraction;
    }
    delivered[static_cast<std::size_t>(a.service_id)] +=
        inst.throughput.at(static_cast<std::size_t>(a.block_id), static_cast<std::size_t>(a.service_id)) *
        a.fraction;
  }
  for (std::size_t i = 0; i < load.size(); ++i) {
    if (load[i] > capacity + 1e-7) {
      fail("mini-slot " + std::to_string(i) + " carries " + std::to_string(load[i]) + " > " +
           std::to_string(capacity));
    }
  }

  double objective = 0.0;
  for (std::size_t k = 0; k < n_services; ++k) {
    if (!inst.services.is_urllc(k)) objective += delivered[k];
  }
  const double scale = 1.0 + std::abs(objective);
  if (std::abs(objective - schedule.objective_kbps) > 1e-9 * scale + 1e-9) {
    fail("reported objective " + std::to_string(schedule.objective_kbps) + " != recomputed " +
         std::to_string(objective));
  }
  if (schedule.delivered_kbps.size() == n_services) {
    for (std::size_t k = 0; k < n_services; ++k) {
      if (std::abs(delivered[k] - schedule.delivered_kbps[k]) > 1e-9 * (1.0 + delivered[k]) + 1e-9) {
        fail("reported delivered rate of service " + std::to_string(k) + " is inconsistent");
      }
    }
  } else if (!schedule.assignments.empty()) {
    fail("delivered rate vector has the wrong length");
  }

  std::size_t unmet = 0;
  for (int k : inst.services.urllc()) {
    const auto ku = static_cast<std::size_t>(k);
    if (delivered[ku] < inst.services[ku].q_kbps - kDemandTolKbps) ++unmet;
  }
  report.demands_met = unmet == 0;
  if (unmet != schedule.unmet_services.size()) fail("unmet-demand list disagrees with recomputation");
  if ((schedule.status == SolveStatus::Optimal || schedule.status == SolveStatus::Feasible) &&
      !report.demands_met) {
    fail("schedule reports " + to_string(schedule.status) + " but leaves URLLC demand unmet");
  }
  return report;
}

}  // namespace gridsched
