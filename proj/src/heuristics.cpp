#include "gridsched/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace gridsched {
namespace {

constexpr int kMaxCategories = 16;

// Tracks which blocks are still free and the assignments made so far.
class Allocator {
 public:
  explicit Allocator(const Instance& inst)
      : inst_(inst),
        available_(inst.block_count(), 1),
        free_(inst.block_count()),
        delivered_(inst.service_count(), 0.0) {}

  bool available(std::size_t b) const { return available_[b] != 0; }
  std::size_t free_blocks() const { return free_; }

  // Gives block b to service k; b and every block overlapping it leave the pool.
  void take(std::size_t b, std::size_t k) {
    schedule_.assignments.push_back({static_cast<int>(b), static_cast<int>(k), 1.0});
    delivered_[k] += inst_.rate(b, k);
    release(b);
    for (int p : inst_.conflicts.neighbors(b)) release(static_cast<std::size_t>(p));
  }

  bool met(std::size_t k) const {
    return delivered_[k] >= inst_.services[k].q_kbps - kDemandTolKbps;
  }

  Schedule finish() {
    finalize(inst_, schedule_);
    schedule_.status = schedule_.demands_met() ? SolveStatus::Feasible : SolveStatus::Infeasible;
    return std::move(schedule_);
  }

 private:
  void release(std::size_t b) {
    free_ -= available_[b];
    available_[b] = 0;
  }

  const Instance& inst_;
  std::vector<std::uint8_t> available_;
  std::size_t free_;
  std::vector<double> delivered_;
  Schedule schedule_;
};

struct Candidate {
  double value;
  int block;
  int service;
};

// Descending value, then ascending (block, service).
bool before(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.block != b.block) return a.block < b.block;
  return a.service < b.service;
}

// Yields candidates in `before` order. A heap instead of a full sort: the
// greedy loops usually stop long before the list is exhausted.
class CandidateQueue {
 public:
  explicit CandidateQueue(std::vector<Candidate> c) : heap_(std::move(c)) {
    std::make_heap(heap_.begin(), heap_.end(), later);
  }
  bool empty() const { return heap_.empty(); }
  Candidate pop() {
    std::pop_heap(heap_.begin(), heap_.end(), later);
    const Candidate c = heap_.back();
    heap_.pop_back();
    return c;
  }

 private:
  static bool later(const Candidate& a, const Candidate& b) { return before(b, a); }
  std::vector<Candidate> heap_;
};

// Greedy max-rate assignment of the remaining blocks to eMBB services. Rates
// are static, so one pass over the sorted pairs equals repeated argmax.
// Only each block's best pair (lowest service on ties) can ever be taken:
// it comes first in the order, and a block never becomes free again.
void fill_embb(const Instance& inst, Allocator& alloc) {
  std::vector<Candidate> cands;
  for (std::size_t b = 0; b < inst.block_count(); ++b) {
    if (!alloc.available(b)) continue;
    Candidate best{0.0, static_cast<int>(b), -1};
    for (int k : inst.services.embb()) {
      const double r = inst.rate(b, static_cast<std::size_t>(k));
      if (r > best.value) best = {r, static_cast<int>(b), k};
    }
    if (best.service >= 0) cands.push_back(best);
  }
  CandidateQueue queue(std::move(cands));
  while (!queue.empty() && alloc.free_blocks() > 0) {
    const Candidate c = queue.pop();
    const auto b = static_cast<std::size_t>(c.block);
    if (alloc.available(b)) alloc.take(b, static_cast<std::size_t>(c.service));
  }
}

}  // namespace

namespace {

// Neighbor rate sums are filled only for the services in `columns`.
ConflictMetrics metrics_for(const Instance& inst, std::span<const int> columns) {
  ConflictMetrics m;
  const std::size_t nb = inst.block_count();
  const std::size_t ns = inst.service_count();
  m.n_services = ns;
  m.total.assign(nb, 0.0);
  m.average.assign(nb * ns, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto nbrs = inst.conflicts.neighbors(b);
    m.total[b] = static_cast<double>(nbrs.size());
    if (nbrs.empty() || columns.empty()) continue;
    double* avg = &m.average[b * ns];
    for (int p : nbrs) {
      const auto row = inst.throughput.row(static_cast<std::size_t>(p));
      for (int k : columns) avg[k] += row[static_cast<std::size_t>(k)];
    }
    for (int k : columns) avg[k] /= m.total[b];
  }
  return m;
}

}  // namespace

ConflictMetrics conflict_metrics(const Instance& inst) {
  std::vector<int> all(inst.service_count());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
  return metrics_for(inst, all);
}

std::string to_string(UtilityVariant v) {
  switch (v) {
    case UtilityVariant::Baseline: return "baseline";
    case UtilityVariant::Total: return "total";
    case UtilityVariant::Avg: return "avg";
    case UtilityVariant::LastPl: return "lastpl";
  }
  return "unknown";
}

UtilityMatrix utility_matrix(const Instance& inst, const ConflictMetrics& metrics, UtilityVariant variant) {
  const auto urllc = inst.services.urllc();
  UtilityMatrix um;
  um.variant = variant;
  um.n_urllc = urllc.size();
  um.u.resize(inst.block_count() * um.n_urllc);
  for (std::size_t b = 0; b < inst.block_count(); ++b) {
    for (std::size_t j = 0; j < urllc.size(); ++j) {
      const auto k = static_cast<std::size_t>(urllc[j]);
      const double r = inst.rate(b, k);
      const double ct = metrics.total[b];
      const double cr = metrics.avg(b, k);
      const double avg_util = cr > 0.0 ? r / cr : r;
      double u = r;
      switch (variant) {
        case UtilityVariant::Baseline: break;
        case UtilityVariant::Total: u = ct > 0.0 ? r / ct : r; break;
        case UtilityVariant::Avg: u = avg_util; break;
        case UtilityVariant::LastPl: u = j + 1 == urllc.size() ? avg_util : r; break;
      }
      um.u[b * um.n_urllc + j] = u;
    }
  }
  return um;
}

Schedule run_ca(const Instance& inst, UtilityVariant variant) {
  // Only the averaging variants read neighbor rates, and only URLLC columns.
  const bool averages = variant == UtilityVariant::Avg || variant == UtilityVariant::LastPl;
  const auto metrics = metrics_for(inst, averages ? inst.services.urllc() : std::span<const int>{});
  return run_ca(inst, utility_matrix(inst, metrics, variant));
}

Schedule run_ca(const Instance& inst, const UtilityMatrix& utility) {
  const auto urllc = inst.services.urllc();
  if (utility.n_urllc != urllc.size() || utility.u.size() != inst.block_count() * urllc.size()) {
    throw std::invalid_argument("utility matrix does not match the instance");
  }
  Allocator alloc(inst);
  std::vector<std::uint8_t> active(inst.service_count(), 0);
  std::size_t n_active = 0;
  for (int k : urllc) {
    if (!alloc.met(static_cast<std::size_t>(k))) {
      active[static_cast<std::size_t>(k)] = 1;
      ++n_active;
    }
  }

  // Utilities are fixed, and blocks and services only ever leave the pool,
  // so taking pairs in sorted order reproduces repeated argmax.
  std::vector<Candidate> cands;
  for (std::size_t b = 0; b < inst.block_count(); ++b) {
    for (std::size_t j = 0; j < urllc.size(); ++j) {
      const auto k = static_cast<std::size_t>(urllc[j]);
      if (inst.rate(b, k) > 0.0) cands.push_back({utility.at(b, j), static_cast<int>(b), urllc[j]});
    }
  }
  CandidateQueue queue(std::move(cands));
  while (n_active > 0 && !queue.empty()) {
    const Candidate c = queue.pop();
    const auto b = static_cast<std::size_t>(c.block);
    const auto k = static_cast<std::size_t>(c.service);
    if (!active[k] || !alloc.available(b)) continue;
    alloc.take(b, k);
    if (alloc.met(k)) {
      active[k] = 0;
      --n_active;
    }
  }

  fill_embb(inst, alloc);
  return alloc.finish();
}

std::string to_string(LossMetric m) {
  switch (m) {
    case LossMetric::Aggregated: return "aggregated";
    case LossMetric::AggregatedLiteral: return "aggregated_literal";
    case LossMetric::MaxUrllcRate: return "max_urllc_rate";
  }
  return "unknown";
}

LossVector loss_vector(const Instance& inst) {
  const std::size_t nb = inst.block_count();
  LossVector loss;
  loss.e.assign(nb, 0.0);
  loss.e_literal.assign(nb, 0.0);
  loss.e_alt.assign(nb, 0.0);
  std::vector<double> embb_rate(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    for (int k : inst.services.embb()) embb_rate[b] += inst.rate(b, static_cast<std::size_t>(k));
    for (int k : inst.services.urllc()) loss.e_alt[b] = std::max(loss.e_alt[b], inst.rate(b, static_cast<std::size_t>(k)));
  }
  for (std::size_t b = 0; b < nb; ++b) {
    const auto nbrs = inst.conflicts.neighbors(b);
    for (int p : nbrs) loss.e[b] += embb_rate[static_cast<std::size_t>(p)];
    loss.e_literal[b] = static_cast<double>(nbrs.size()) * embb_rate[b];
  }
  return loss;
}

std::vector<double> preference_score(const LossVector& loss, LossMetric metric) {
  switch (metric) {
    case LossMetric::Aggregated: return loss.e;
    case LossMetric::AggregatedLiteral: return loss.e_literal;
    case LossMetric::MaxUrllcRate: {
      std::vector<double> s(loss.e_alt.size());
      std::transform(loss.e_alt.begin(), loss.e_alt.end(), s.begin(), [](double v) { return -v; });
      return s;
    }
  }
  return loss.e;
}

int category_index(double q_kbps, double rate_kbps) {
  if (!(rate_kbps > 0.0)) return 0;
  const double ratio = std::ceil(q_kbps / rate_kbps);
  return ratio > static_cast<double>(1 << 30) ? (1 << 30) : static_cast<int>(ratio);
}

CategoryTable build_categories(const Instance& inst, int h, std::span<const double> score) {
  if (h < 1) throw std::invalid_argument("category count must be at least 1");
  if (score.size() != inst.block_count()) throw std::invalid_argument("score vector has the wrong length");
  const auto urllc = inst.services.urllc();
  CategoryTable table;
  table.h = h;
  table.cat.assign(urllc.size(), std::vector<std::vector<int>>(static_cast<std::size_t>(h)));
  for (std::size_t j = 0; j < urllc.size(); ++j) {
    const auto k = static_cast<std::size_t>(urllc[j]);
    const double q = inst.services[k].q_kbps;
    for (std::size_t b = 0; b < inst.block_count(); ++b) {
      const int i = category_index(q, inst.rate(b, k));
      if (i >= 1 && i <= h) table.cat[j][static_cast<std::size_t>(i - 1)].push_back(static_cast<int>(b));
    }
  }

  // Pairwise pruning: sweep in block-id order; a block is dropped if a kept
  // overlapping block has loss <= its own, otherwise it evicts every kept
  // overlapping block.
  std::vector<long> kept_stamp(inst.block_count(), -1);
  long stamp = 0;
  for (auto& per_service : table.cat) {
    for (auto& members : per_service) {
      std::vector<int> kept;
      for (int b : members) {
        const auto bu = static_cast<std::size_t>(b);
        bool loses = false;
        for (int p : inst.conflicts.neighbors(bu)) {
          if (kept_stamp[static_cast<std::size_t>(p)] == stamp && score[static_cast<std::size_t>(p)] <= score[bu]) {
            loses = true;
            break;
          }
        }
        if (loses) continue;
        for (int p : inst.conflicts.neighbors(bu)) {
          if (kept_stamp[static_cast<std::size_t>(p)] == stamp) kept_stamp[static_cast<std::size_t>(p)] = -1;
        }
        kept_stamp[bu] = stamp;
        kept.push_back(b);
      }
      members.clear();
      for (int b : kept) {
        if (kept_stamp[static_cast<std::size_t>(b)] == stamp) members.push_back(b);
      }
      std::sort(members.begin(), members.end(), [&score](int a, int b) {
        const double sa = score[static_cast<std::size_t>(a)];
        const double sb = score[static_cast<std::size_t>(b)];
        return sa != sb ? sa < sb : a < b;
      });
      ++stamp;
    }
  }
  return table;
}

int default_category_count(const Instance& inst) {
  double max_q = 0.0;
  double min_rate = std::numeric_limits<double>::infinity();
  for (int k : inst.services.urllc()) {
    const auto ku = static_cast<std::size_t>(k);
    max_q = std::max(max_q, inst.services[ku].q_kbps);
    for (std::size_t b = 0; b < inst.block_count(); ++b) {
      const double r = inst.rate(b, ku);
      if (r > 0.0) min_rate = std::min(min_rate, r);
    }
  }
  if (min_rate == std::numeric_limits<double>::infinity() || max_q <= 0.0) return 1;
  const double h = std::ceil(max_q / min_rate);
  return static_cast<int>(std::clamp(h, 1.0, static_cast<double>(kMaxCategories)));
}

Schedule run_bpb(const Instance& inst, const BpbOptions& options) {
  const int h = options.h > 0 ? options.h : default_category_count(inst);
  const std::vector<double> score = preference_score(loss_vector(inst), options.loss);
  const CategoryTable table = build_categories(inst, h, score);
  const auto urllc = inst.services.urllc();

  Allocator alloc(inst);
  std::vector<std::uint8_t> active(urllc.size(), 0);
  for (std::size_t j = 0; j < urllc.size(); ++j) active[j] = !alloc.met(static_cast<std::size_t>(urllc[j]));

  std::vector<int> live;
  for (int i = 1; i <= h; ++i) {
    for (;;) {
      // Most constrained service first: fewest live blocks at this level.
      std::size_t pick = urllc.size();
      std::size_t pick_count = 0;
      for (std::size_t j = 0; j < urllc.size(); ++j) {
        if (!active[j]) continue;
        std::size_t count = 0;
        for (int b : table.at(j, i)) count += alloc.available(static_cast<std::size_t>(b)) ? 1 : 0;
        if (count < static_cast<std::size_t>(i)) continue;
        if (pick == urllc.size() || count < pick_count) {
          pick = j;
          pick_count = count;
        }
      }
      if (pick == urllc.size()) break;

      const auto k = static_cast<std::size_t>(urllc[pick]);
      live.clear();
      for (int b : table.at(pick, i)) {
        if (alloc.available(static_cast<std::size_t>(b))) live.push_back(b);
        if (live.size() == static_cast<std::size_t>(i)) break;
      }
      for (int b : live) {
        if (alloc.available(static_cast<std::size_t>(b))) alloc.take(static_cast<std::size_t>(b), k);
      }
      if (alloc.met(k)) active[pick] = 0;
    }
  }

  fill_embb(inst, alloc);
  return alloc.finish();
}

bool mbp_precheck(const Instance& inst, double delta) {
  double urllc_sum = 0.0;
  double total_sum = 0.0;
  for (std::size_t b = 0; b < inst.block_count(); ++b) {
    for (std::size_t k = 0; k < inst.service_count(); ++k) {
      const double r = inst.rate(b, k);
      total_sum += r;
      if (inst.services.is_urllc(k)) urllc_sum += r;
    }
  }
  return urllc_sum > delta * total_sum;
}

Schedule run_mbp(const Instance& inst, const MbpOptions& options) {
  if (!(options.delta > 0.0 && options.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  BpbOptions bpb;
  bpb.h = options.h;
  bpb.loss = options.literal_loss ? LossMetric::AggregatedLiteral : LossMetric::Aggregated;
  if (mbp_precheck(inst, options.delta)) bpb.loss = LossMetric::MaxUrllcRate;
  return run_bpb(inst, bpb);
}

}  // namespace gridsched
