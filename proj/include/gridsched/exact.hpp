#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "gridsched/lp.hpp"
#include "gridsched/problem.hpp"

namespace gridsched {

inline constexpr std::size_t kBruteforceMaxBlocks = 14;
inline constexpr std::size_t kBruteforceMaxServices = 4;

class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive search over every conflict-free labelling of blocks with services
// (pairs with zero rate are never assigned). Pruning only discards subtrees
// that provably cannot reach the incumbent or a demand. Ties go to the
// lexicographically smallest sorted assignment list.
// Throws InstanceTooLarge beyond kBruteforceMaxBlocks / kBruteforceMaxServices.
Schedule solve_p0_bruteforce(const Instance& inst);

struct BnbOptions {
  double time_limit_ms = 60'000.0;
  double gap_tol = 0.0;           // relative
  double integrality_tol = 1e-6;
  double abs_tol = 1e-6;          // kbps; node pruning slack
  LpOptions lp;
  // Demand-feasible schedule used as the starting incumbent, if any.
  std::optional<Schedule> initial_incumbent;
};

struct BnbStats {
  long nodes = 0;
  long lp_iterations = 0;
  double root_bound = 0.0;
  long incumbent_updates = 0;
};

// Best-bound branch and bound on the OMA program using the r_tilde = 1 LP
// relaxation. Zero-rate pairs are dropped, and each block keeps a single eMBB
// column, its highest-rate eMBB service (lowest id on ties): swapping a
// block's eMBB user for a better one never breaks feasibility. Branches on
// the most fractional share, lowest (block, service) first. Every node's LP
// point is also rounded greedily into a candidate incumbent. Returns Optimal once the open-node bound is
// within gap_tol of the incumbent, TimeLimit with the incumbent and bound when
// the clock runs out, Infeasible when no integral schedule exists.
Schedule solve_p0_bnb(const Instance& inst, const BnbOptions& options = {}, BnbStats* stats = nullptr);

}  // namespace gridsched
