#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridsched/problem.hpp"

namespace gridsched {

// Aggregate conflict C^t_b (number of overlapping blocks) and average conflict
// C^r_{b,k} (mean rate for service k over the blocks overlapping b).
struct ConflictMetrics {
  std::size_t n_services = 0;
  std::vector<double> total;    // [b]
  std::vector<double> average;  // [b][k], 0 for isolated blocks

  double avg(std::size_t b, std::size_t k) const { return average[b * n_services + k]; }
};

ConflictMetrics conflict_metrics(const Instance& inst);

enum class UtilityVariant : std::uint8_t { Baseline, Total, Avg, LastPl };
std::string to_string(UtilityVariant v);

// URLLC utilities u[b][j] where j indexes inst.services.urllc().
struct UtilityMatrix {
  UtilityVariant variant = UtilityVariant::Baseline;
  std::size_t n_urllc = 0;
  std::vector<double> u;

  double at(std::size_t b, std::size_t j) const { return u[b * n_urllc + j]; }
};

// Baseline: r. Total: r / C^t (r when C^t = 0). Avg: r / C^r (r when C^r = 0).
// LastPl: r for every URLLC service but the last one, which uses Avg.
UtilityMatrix utility_matrix(const Instance& inst, const ConflictMetrics& metrics, UtilityVariant variant);

// Conflict-aware greedy. Phase 1 repeatedly gives the available block/URLLC
// pair of highest utility to that service, dropping a service once its demand
// is met; phase 2 hands the remaining blocks to eMBB services by rate. Pairs
// with zero rate are never assigned. Ties go to the lowest (block, service).
// Status is Feasible when every demand is met, Infeasible otherwise.
Schedule run_ca(const Instance& inst, UtilityVariant variant);
Schedule run_ca(const Instance& inst, const UtilityMatrix& utility);

enum class LossMetric : std::uint8_t {
  Aggregated,         // e_b: eMBB rate of the blocks b overlaps
  AggregatedLiteral,  // C^t_b * (eMBB rate of b itself)
  MaxUrllcRate,       // e'_b = max URLLC rate of b; larger preferred
};
std::string to_string(LossMetric m);

struct LossVector {
  std::vector<double> e;
  std::vector<double> e_literal;
  std::vector<double> e_alt;
};

LossVector loss_vector(const Instance& inst);

// Lower is preferred: e or e_literal as is, -e' for MaxUrllcRate.
std::vector<double> preference_score(const LossVector& loss, LossMetric metric);

// cat[j][i - 1]: blocks whose ceil(q / r) equals i for URLLC service j, pruned
// to a conflict-free set and sorted by ascending score (block id on ties).
struct CategoryTable {
  int h = 0;
  std::vector<std::vector<std::vector<int>>> cat;

  const std::vector<int>& at(std::size_t j, int i) const { return cat[j][static_cast<std::size_t>(i - 1)]; }
};

// Category before pruning and ordering; 0 when the block serves k at zero rate.
int category_index(double q_kbps, double rate_kbps);

CategoryTable build_categories(const Instance& inst, int h, std::span<const double> score);

// ceil(max q / smallest positive URLLC rate), clamped to [1, 16].
int default_category_count(const Instance& inst);

struct BpbOptions {
  int h = 0;  // 0 selects default_category_count
  LossMetric loss = LossMetric::Aggregated;
};

// Bin-packing based allocation. For i = 1..H, the unsatisfied service whose
// level-i category holds the fewest live blocks (and at least i of them) takes
// its i best blocks; this repeats at level i until no service qualifies. The
// remaining blocks then go to eMBB services greedily by rate.
Schedule run_bpb(const Instance& inst, const BpbOptions& options = {});

struct MbpOptions {
  int h = 0;
  double delta = 0.5;
  bool literal_loss = false;
};

// True when the URLLC share of the total block throughput exceeds delta.
bool mbp_precheck(const Instance& inst, double delta);

// BPB with e'_b when the pre-check trips, plain BPB otherwise.
Schedule run_mbp(const Instance& inst, const MbpOptions& options = {});

}  // namespace gridsched
