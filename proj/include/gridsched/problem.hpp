#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gridsched/channel.hpp"
#include "gridsched/grid.hpp"

namespace gridsched {

// Demand rows are met when delivered >= q - kDemandTolKbps.
inline constexpr double kDemandTolKbps = 1e-6;

// One scheduling instance: blocks on a grid, their overlap structure, the
// latency-masked throughput matrix and the services competing for blocks.
struct Instance {
  GridSpec grid;
  std::vector<Block> blocks;
  ConflictStructure conflicts;
  ThroughputMatrix throughput;
  ServiceSet services;

  std::size_t block_count() const { return blocks.size(); }
  std::size_t service_count() const { return services.size(); }
  double rate(std::size_t b, std::size_t k) const { return throughput.at(b, k); }

  // Throws std::invalid_argument on inconsistent dimensions.
  void validate() const;
};

Instance make_instance(const GridSpec& grid, std::vector<Block> blocks, ThroughputMatrix throughput,
                       ServiceSet services);

enum class SolveStatus : std::uint8_t { Optimal, Feasible, Infeasible, TimeLimit };
std::string to_string(SolveStatus s);

struct Assignment {
  int block_id = 0;
  int service_id = 0;
  double fraction = 1.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment& a, const Assignment& b) {
    if (a.block_id != b.block_id) return a.block_id <=> b.block_id;
    return a.service_id <=> b.service_id;
  }
};

struct Schedule {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<Assignment> assignments;  // sorted by (block_id, service_id)
  double objective_kbps = 0.0;          // eMBB sum rate
  std::vector<double> delivered_kbps;   // per service
  std::vector<int> unmet_services;      // URLLC services below demand
  // Branch-and-bound only: best upper bound and relative gap at termination.
  double best_bound = std::numeric_limits<double>::quiet_NaN();
  double bound_gap = std::numeric_limits<double>::quiet_NaN();

  bool demands_met() const { return unmet_services.empty(); }
  // A schedule the caller may use as an allocation.
  bool has_solution() const {
    return status == SolveStatus::Optimal || status == SolveStatus::Feasible ||
           (status == SolveStatus::TimeLimit && !assignments.empty());
  }
};

// Sorts the assignments and recomputes delivered rates, the eMBB objective
// and the unmet URLLC list from the instance.
void finalize(const Instance& inst, Schedule& schedule);

struct ValidationReport {
  bool ok = true;
  bool demands_met = true;
  std::vector<std::string> violations;
};

// Checks a schedule against the instance from first principles: every
// mini-slot carries at most `capacity` total fraction, no (block, service)
// pair repeats, fractions lie in [0, 1], reported rates and objective match a
// recomputation, and schedules claiming Optimal/Feasible meet every demand.
// Uses block footprints directly and never the conflict structure.
ValidationReport validate_schedule(const Instance& inst, const Schedule& schedule,
                                   double capacity = 1.0);

}  // namespace gridsched
