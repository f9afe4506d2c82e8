#include "gridsched/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "gridsched/noma.hpp"

namespace gridsched {
namespace {

class BruteForce {
 public:
  explicit BruteForce(const Instance& inst) : inst_(inst) {
    const std::size_t nb = inst.block_count();
    const std::size_t ns = inst.service_count();
    occupied_.assign(static_cast<std::size_t>(inst.grid.minislot_count()), 0);
    delivered_.assign(ns, 0.0);
    suffix_embb_.assign(nb + 1, 0.0);
    suffix_rate_.assign(ns, std::vector<double>(nb + 1, 0.0));
    for (std::size_t b = nb; b-- > 0;) {
      double best = 0.0;
      for (int k : inst.services.embb()) best = std::max(best, inst.rate(b, static_cast<std::size_t>(k)));
      suffix_embb_[b] = suffix_embb_[b + 1] + best;
      for (std::size_t k = 0; k < ns; ++k) suffix_rate_[k][b] = suffix_rate_[k][b + 1] + inst.rate(b, k);
    }
  }

  Schedule solve() {
    search(0);
    Schedule s;
    if (best_) {
      s.status = SolveStatus::Optimal;
      s.assignments = *best_;
    } else {
      s.status = SolveStatus::Infeasible;
    }
    finalize(inst_, s);
    if (best_) {
      s.best_bound = s.objective_kbps;
      s.bound_gap = 0.0;
    }
    return s;
  }

 private:
  bool demands_reachable(std::size_t b) const {
    for (int k : inst_.services.urllc()) {
      const auto ku = static_cast<std::size_t>(k);
      if (delivered_[ku] + suffix_rate_[ku][b] < inst_.services[ku].q_kbps - kDemandTolKbps) return false;
    }
    return true;
  }

  void search(std::size_t b) {
    if (best_ && objective_ + suffix_embb_[b] < best_objective_ - 1e-9) return;
    if (!demands_reachable(b)) return;
    if (b == inst_.block_count()) {
      consider_leaf();
      return;
    }
    const Block& block = inst_.blocks[b];
    bool free = true;
    for (int slot : block.minislots) free = free && occupied_[static_cast<std::size_t>(slot)] == 0;
    if (free) {
      for (std::size_t k = 0; k < inst_.service_count(); ++k) {
        const double r = inst_.rate(b, k);
        if (r <= 0.0) continue;
        for (int slot : block.minislots) occupied_[static_cast<std::size_t>(slot)] = 1;
        current_.push_back({static_cast<int>(b), static_cast<int>(k), 1.0});
        delivered_[k] += r;
        const double saved = objective_;
        if (!inst_.services.is_urllc(k)) objective_ += r;
        search(b + 1);
        objective_ = saved;
        delivered_[k] -= r;
        current_.pop_back();
        for (int slot : block.minislots) occupied_[static_cast<std::size_t>(slot)] = 0;
      }
    }
    search(b + 1);
  }

  void consider_leaf() {
    // demands_reachable at b == block_count means every demand is met.
    if (!best_ || objective_ > best_objective_ + 1e-9 ||
        (objective_ >= best_objective_ - 1e-9 && current_ < *best_)) {
      best_ = current_;
      best_objective_ = objective_;
    }
  }

  const Instance& inst_;
  std::vector<std::uint8_t> occupied_;
  std::vector<double> delivered_;
  std::vector<double> suffix_embb_;
  std::vector<std::vector<double>> suffix_rate_;
  std::vector<Assignment> current_;
  double objective_ = 0.0;
  std::optional<std::vector<Assignment>> best_;
  double best_objective_ = 0.0;
};

struct Node {
  double bound;  // LP bound of the parent
  int depth;
  long id;
  std::vector<std::pair<int, std::uint8_t>> fixings;  // (column, value)
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

double relative_gap(double bound, double incumbent) {
  return std::max(0.0, bound - incumbent) / std::max(std::abs(incumbent), 1.0);
}

// URLLC pairs with positive rate plus the best eMBB pair of each block.
std::vector<Assignment> reduced_columns(const Instance& inst) {
  std::vector<Assignment> cols;
  for (std::size_t b = 0; b < inst.block_count(); ++b) {
    for (int k : inst.services.urllc()) {
      if (inst.rate(b, static_cast<std::size_t>(k)) > 0.0) cols.push_back({static_cast<int>(b), k, 0.0});
    }
    int best = -1;
    double best_rate = 0.0;
    for (int k : inst.services.embb()) {
      const double r = inst.rate(b, static_cast<std::size_t>(k));
      if (r > best_rate) {
        best_rate = r;
        best = k;
      }
    }
    if (best >= 0) cols.push_back({static_cast<int>(b), best, 0.0});
  }
  return cols;
}

// Greedy rounding of an LP point: URLLC columns by descending share until
// each demand is met, then eMBB columns by share, skipping blocks that clash
// with earlier picks; the blocks left free go to their eMBB column by rate.
std::optional<Schedule> round_lp_point(const Instance& inst, const P1Model& model, const std::vector<double>& x) {
  const std::size_t n = model.columns.size();
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < n; ++c) {
    if (x[c] > 1e-9) order.push_back(c);
  }
  auto urllc_col = [&](std::size_t c) {
    return inst.services.is_urllc(static_cast<std::size_t>(model.columns[c].service_id));
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (urllc_col(a) != urllc_col(b)) return urllc_col(a);
    return x[a] > x[b];
  });

  std::vector<std::uint8_t> occupied(static_cast<std::size_t>(inst.grid.minislot_count()), 0);
  std::vector<double> delivered(inst.service_count(), 0.0);
  Schedule s;
  auto try_take = [&](std::size_t c) {
    const Assignment& col = model.columns[c];
    const Block& block = inst.blocks[static_cast<std::size_t>(col.block_id)];
    for (int slot : block.minislots) {
      if (occupied[static_cast<std::size_t>(slot)]) return;
    }
    const auto k = static_cast<std::size_t>(col.service_id);
    if (inst.services.is_urllc(k) && delivered[k] >= inst.services[k].q_kbps - kDemandTolKbps) return;
    for (int slot : block.minislots) occupied[static_cast<std::size_t>(slot)] = 1;
    delivered[k] += inst.rate(static_cast<std::size_t>(col.block_id), k);
    s.assignments.push_back({col.block_id, col.service_id, 1.0});
  };
  for (std::size_t c : order) try_take(c);

  std::vector<std::size_t> rest;
  for (std::size_t c = 0; c < n; ++c) {
    if (!inst.services.is_urllc(static_cast<std::size_t>(model.columns[c].service_id))) rest.push_back(c);
  }
  auto rate_of = [&](std::size_t c) {
    return inst.rate(static_cast<std::size_t>(model.columns[c].block_id),
                     static_cast<std::size_t>(model.columns[c].service_id));
  };
  std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return rate_of(a) > rate_of(b); });
  for (std::size_t c : rest) try_take(c);

  finalize(inst, s);
  if (!s.demands_met()) return std::nullopt;
  return s;
}

}  // namespace

Schedule solve_p0_bruteforce(const Instance& inst) {
  if (inst.block_count() > kBruteforceMaxBlocks || inst.service_count() > kBruteforceMaxServices) {
    throw InstanceTooLarge("instance too large for brute force: " + std::to_string(inst.block_count()) +
                           " blocks (limit " + std::to_string(kBruteforceMaxBlocks) + "), " +
                           std::to_string(inst.service_count()) + " services (limit " +
                           std::to_string(kBruteforceMaxServices) + ")");
  }
  return BruteForce(inst).solve();
}

Schedule solve_p0_bnb(const Instance& inst, const BnbOptions& options, BnbStats* stats) {
  if (!(options.gap_tol >= 0.0)) throw std::invalid_argument("gap tolerance must be non-negative");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed_ms = [&start] {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };

  P1Model model = build_p1(inst, NomaConfig{1.0}, reduced_columns(inst));
  LinearProgram& lp = model.lp;
  // With binary shares, sum r x >= q implies sum min(r, q) x >= q: any one
  // block with r >= q meets the demand alone. The tightened rows cut off the
  // fractional points that buy a demand with a sliver of a large block.
  for (int row = 0; row < model.first_capacity_row; ++row) {
    LpRow& demand = lp.rows[static_cast<std::size_t>(row)];
    for (LpTerm& t : demand.terms) t.coeff = std::min(t.coeff, demand.rhs);
  }
  // Service k needs at least as many blocks as the shortest prefix of its
  // rates, sorted descending, that reaches q_k.
  for (int k : inst.services.urllc()) {
    const auto ku = static_cast<std::size_t>(k);
    std::vector<LpTerm> terms;
    std::vector<double> rates;
    for (std::size_t c = 0; c < model.columns.size(); ++c) {
      if (model.columns[c].service_id != k) continue;
      terms.push_back({static_cast<int>(c), 1.0});
      rates.push_back(inst.rate(static_cast<std::size_t>(model.columns[c].block_id), ku));
    }
    std::sort(rates.begin(), rates.end(), std::greater<>());
    double sum = 0.0;
    int need = 0;
    for (double r : rates) {
      if (sum >= inst.services[ku].q_kbps - kDemandTolKbps) break;
      sum += r;
      ++need;
    }
    if (need > 1) lp.add_row(std::move(terms), RowSense::GreaterEqual, need);
  }
  const std::vector<double> root_lower = lp.lower;
  const std::vector<double> root_upper = lp.upper;
  const std::size_t n_cols = model.columns.size();

  BnbStats local_stats;
  std::optional<Schedule> incumbent;
  double incumbent_obj = -kInf;
  auto prune_slack = [&] {
    return std::max(options.abs_tol, options.gap_tol * std::max(std::abs(incumbent_obj), 1.0));
  };
  auto offer = [&](Schedule cand) {
    if (!incumbent || cand.objective_kbps > incumbent_obj + 1e-9) {
      incumbent_obj = cand.objective_kbps;
      incumbent = std::move(cand);
      ++local_stats.incumbent_updates;
    }
  };
  if (options.initial_incumbent) {
    Schedule start = *options.initial_incumbent;
    for (Assignment& a : start.assignments) {
      if (a.fraction != 1.0) throw std::invalid_argument("initial incumbent must be integral");
    }
    finalize(inst, start);
    const ValidationReport check = validate_schedule(inst, start);
    if (!check.ok || !check.demands_met) throw std::invalid_argument("initial incumbent is not a feasible schedule");
    start.status = SolveStatus::Feasible;
    offer(std::move(start));
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push({kInf, 0, next_id++, {}});
  bool timed_out = false;
  double open_bound = -kInf;

  while (!open.empty()) {
    if (incumbent && open.top().bound <= incumbent_obj + prune_slack()) break;
    if (elapsed_ms() > options.time_limit_ms) {
      timed_out = true;
      open_bound = open.top().bound;
      break;
    }
    Node node = open.top();
    open.pop();

    lp.lower = root_lower;
    lp.upper = root_upper;
    for (const auto& [col, value] : node.fixings) {
      lp.lower[static_cast<std::size_t>(col)] = value;
      lp.upper[static_cast<std::size_t>(col)] = value;
    }
    const LpSolution sol = solve_lp(lp, options.lp);
    ++local_stats.nodes;
    local_stats.lp_iterations += sol.iterations;
    if (sol.status == LpStatus::Infeasible) continue;
    if (sol.status != LpStatus::Optimal) {
      throw std::runtime_error("node relaxation ended with status " + to_string(sol.status));
    }
    if (node.id == 0) local_stats.root_bound = sol.objective;
    if (incumbent && sol.objective <= incumbent_obj + prune_slack()) continue;
    if (auto rounded = round_lp_point(inst, model, sol.x)) offer(std::move(*rounded));
    if (incumbent && sol.objective <= incumbent_obj + prune_slack()) continue;

    // Most fractional column; ties to the lowest (block, service).
    std::size_t branch = n_cols;
    double best_frac = options.integrality_tol;
    for (std::size_t c = 0; c < n_cols; ++c) {
      const double frac = std::min(sol.x[c], 1.0 - sol.x[c]);
      if (frac > best_frac) {
        best_frac = frac;
        branch = c;
      }
    }
    if (branch == n_cols) {
      Schedule cand;
      for (std::size_t c = 0; c < n_cols; ++c) {
        if (sol.x[c] >= 0.5) cand.assignments.push_back(model.columns[c]);
      }
      for (Assignment& a : cand.assignments) a.fraction = 1.0;
      finalize(inst, cand);
      if (cand.demands_met()) {
        offer(std::move(cand));
        continue;
      }
      // Rounding lost a tight demand; branch on any non-integral column left.
      best_frac = 0.0;
      for (std::size_t c = 0; c < n_cols; ++c) {
        const double frac = std::min(sol.x[c], 1.0 - sol.x[c]);
        if (frac > best_frac) {
          best_frac = frac;
          branch = c;
        }
      }
      if (branch == n_cols) continue;
    }

    for (std::uint8_t value : {std::uint8_t{1}, std::uint8_t{0}}) {
      Node child{sol.objective, node.depth + 1, next_id++, node.fixings};
      child.fixings.push_back({static_cast<int>(branch), value});
      open.push(std::move(child));
    }
  }

  Schedule result;
  if (incumbent) result = std::move(*incumbent);
  if (timed_out) {
    result.status = SolveStatus::TimeLimit;
    result.best_bound = std::max(open_bound, incumbent ? incumbent_obj : -kInf);
    if (incumbent) result.bound_gap = relative_gap(result.best_bound, incumbent_obj);
  } else if (incumbent) {
    result.status = SolveStatus::Optimal;
    const double bound = open.empty() ? incumbent_obj : std::max(incumbent_obj, open.top().bound);
    result.best_bound = bound;
    result.bound_gap = relative_gap(bound, incumbent_obj);
  } else {
    result.status = SolveStatus::Infeasible;
  }
  finalize(inst, result);
  if (stats) *stats = local_stats;
  return result;
}

}  // namespace gridsched
