#pragma once

#include <vector>

#include "gridsched/harness.hpp"

// Small scenarios shared by several suites.
namespace fixture {

inline gridsched::Scenario small(int n_time, int n_freq, std::vector<gridsched::UrllcParams> urllc, int embb,
                                 double bandwidth_mhz = 2.0) {
  gridsched::Scenario scn;
  scn.scenario_id = "small";
  scn.grid = {n_time, n_freq, 2.0, bandwidth_mhz};
  scn.urllc = std::move(urllc);
  scn.embb_count = embb;
  scn.trials = 1;
  return scn;
}

}  // namespace fixture
