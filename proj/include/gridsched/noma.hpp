#pragma once

#include <vector>

#include "gridsched/lp.hpp"
#include "gridsched/problem.hpp"

namespace gridsched {

struct NomaConfig {
  double r_tilde = 1.0;  // per-mini-slot capacity; 1 recovers the OMA relaxation
};

// Linear program over fractional block-service shares plus the (block,
// service) pair behind each column.
struct P1Model {
  LinearProgram lp;
  std::vector<Assignment> columns;  // fraction unused
  int first_capacity_row = 0;       // demand rows precede capacity rows
};

// Maximize the eMBB sum rate subject to URLLC demand rows and one capacity row
// per mini-slot with right-hand side r_tilde; every share is boxed in [0, 1].
// With drop_zero_rate, pairs with r = 0 get no column.
P1Model build_p1(const Instance& inst, const NomaConfig& noma, bool drop_zero_rate = false);

// Same program restricted to the given (block, service) columns, which must be
// sorted and distinct.
P1Model build_p1(const Instance& inst, const NomaConfig& noma, std::vector<Assignment> columns);

struct P1Result {
  P1Model model;
  LpSolution lp_solution;
  Schedule schedule;  // fractional; Optimal or Infeasible
};

P1Result solve_p1(const Instance& inst, const NomaConfig& noma, const LpOptions& options = {});

}  // namespace gridsched
