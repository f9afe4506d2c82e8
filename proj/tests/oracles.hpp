#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's solvers; only plain data types are shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "gridsched/channel.hpp"
#include "gridsched/grid.hpp"
#include "gridsched/lp.hpp"
#include "gridsched/problem.hpp"

namespace oracle {

// Mini-slots of a block, recomputed from the origin and extents.
inline std::set<int> cells(const gridsched::GridSpec& g, gridsched::ShapeId s, int t0, int f0) {
  const auto& shape = gridsched::shape_of(s);
  std::set<int> out;
  for (int dt = 0; dt < shape.time_extent; ++dt) {
    for (int df = 0; df < shape.freq_extent; ++df) out.insert((f0 + df) * g.n_time + (t0 + dt));
  }
  return out;
}

inline bool overlap(const std::set<int>& a, const std::set<int>& b) {
  for (int x : a) {
    if (b.count(x)) return true;
  }
  return false;
}

// Shannon bits of one mini-slot: W0 [Hz] * T0 [s] * log2(1 + snr).
inline double slot_bits(const gridsched::GridSpec& g, double snr_db) {
  const double w0 = g.bandwidth_mhz * 1e6 / g.n_freq;
  const double t0 = g.window_ms * 1e-3 / g.n_time;
  return w0 * t0 * std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
}

// Vertex enumeration for tiny LPs with finite variable bounds. Every vertex
// of the feasible polytope makes n linearly independent constraints tight;
// the oracle tries every choice of n constraints among rows and bounds.
struct VertexResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

inline VertexResult enumerate_vertices(const gridsched::LinearProgram& lp, double tol = 1e-9) {
  using gridsched::RowSense;
  const std::size_t n = lp.num_vars();
  struct Con {
    std::vector<double> a;
    double rhs;
  };
  std::vector<Con> cons;  // each usable as an equality
  for (const auto& row : lp.rows) {
    std::vector<double> a(n, 0.0);
    for (const auto& t : row.terms) a[static_cast<std::size_t>(t.var)] += t.coeff;
    cons.push_back({a, row.rhs});
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    cons.push_back({e, lp.lower[j]});
    cons.push_back({e, lp.upper[j]});
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] < lp.lower[j] - tol || x[j] > lp.upper[j] + tol) return false;
    }
    for (const auto& row : lp.rows) {
      double act = 0.0;
      for (const auto& t : row.terms) act += t.coeff * x[static_cast<std::size_t>(t.var)];
      const double scale = tol * (1.0 + std::abs(row.rhs));
      if (row.sense == RowSense::LessEqual && act > row.rhs + scale) return false;
      if (row.sense == RowSense::GreaterEqual && act < row.rhs - scale) return false;
      if (row.sense == RowSense::Equal && std::abs(act - row.rhs) > scale) return false;
    }
    return true;
  };

  VertexResult best;
  const bool maximize = lp.sense == gridsched::ObjectiveSense::Maximize;
  std::vector<std::size_t> pick(n);
  // Iterate over n-subsets of constraints in lexicographic order.
  const std::size_t m = cons.size();
  if (n == 0 || n > m) return best;
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  for (;;) {
    std::vector<std::vector<double>> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = cons[pick[i]].a;
      b[i] = cons[pick[i]].rhs;
    }
    if (auto x = solve_square(a, b); x && feasible(*x)) {
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * (*x)[j];
      if (!best.feasible || (maximize ? obj > best.objective : obj < best.objective)) {
        best.feasible = true;
        best.objective = obj;
        best.x = *x;
      }
    }
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == m - n + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

// Random bounded LP with up to six variables.
inline gridsched::LinearProgram random_lp(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  using gridsched::RowSense;
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> bound(0.5, 6.0);
  std::uniform_int_distribution<int> sense(0, 5);
  gridsched::LinearProgram lp;
  lp.sense = sense(rng) % 2 ? gridsched::ObjectiveSense::Maximize : gridsched::ObjectiveSense::Minimize;
  // A known interior-ish point keeps most instances feasible.
  std::vector<double> x0(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = sense(rng) == 0 ? -bound(rng) : 0.0;
    const double hi = lo + bound(rng);
    lp.add_variable(std::round(coef(rng) * 4.0) / 4.0, lo, hi);
    x0[j] = lo + 0.5 * (hi - lo);
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<gridsched::LpTerm> terms;
    double act = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (sense(rng) == 0) continue;
      const double a = std::round(coef(rng) * 2.0) / 2.0;
      if (a == 0.0) continue;
      terms.push_back({static_cast<int>(j), a});
      act += a * x0[j];
    }
    const int s = sense(rng);
    if (s <= 2) {
      lp.add_row(terms, RowSense::LessEqual, std::round(act + bound(rng)));
    } else if (s <= 4) {
      lp.add_row(terms, RowSense::GreaterEqual, std::round(act - bound(rng)));
    } else {
      lp.add_row(terms, RowSense::Equal, act);
    }
  }
  return lp;
}

// Optimum of a tiny P0 instance by enumerating every labelling (block ->
// nothing or any service) whose blocks do not share a mini-slot. Overlaps are
// checked on raw footprints; no bound or demand pruning.
inline std::optional<double> p0_optimum(const gridsched::Instance& inst) {
  const std::size_t nb = inst.block_count();
  const std::size_t ns = inst.service_count();
  std::vector<int> used(static_cast<std::size_t>(inst.grid.minislot_count()), 0);
  std::vector<double> delivered(ns, 0.0);
  std::optional<double> best;
  auto rec = [&](auto&& self, std::size_t b, double obj) -> void {
    if (b == nb) {
      for (int k : inst.services.urllc()) {
        const auto ku = static_cast<std::size_t>(k);
        if (delivered[ku] < inst.services[ku].q_kbps - gridsched::kDemandTolKbps) return;
      }
      if (!best || obj > *best) best = obj;
      return;
    }
    self(self, b + 1, obj);
    const auto& slots = inst.blocks[b].minislots;
    for (int s : slots) {
      if (used[static_cast<std::size_t>(s)]) return;
    }
    for (int s : slots) used[static_cast<std::size_t>(s)] = 1;
    for (std::size_t k = 0; k < ns; ++k) {
      delivered[k] += inst.rate(b, k);
      self(self, b + 1, obj + (inst.services.is_urllc(k) ? 0.0 : inst.rate(b, k)));
      delivered[k] -= inst.rate(b, k);
    }
    for (int s : slots) used[static_cast<std::size_t>(s)] = 0;
  };
  rec(rec, 0, 0.0);
  return best;
}

}  // namespace oracle
