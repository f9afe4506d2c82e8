#include "gridsched/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridsched {
namespace {

// Absorbs rounding in (col + extent) * slot_duration against decimal tolerances.
constexpr double kLatencySlackMs = 1e-9;

}  // namespace

void GridSpec::validate() const {
  if (n_time < 1 || n_freq < 1) {
    throw std::invalid_argument("grid must have at least one time column and one frequency row");
  }
  if (!(window_ms > 0.0) || !(bandwidth_mhz > 0.0)) {
    throw std::invalid_argument("grid window and bandwidth must be positive");
  }
}

std::string shape_name(ShapeId id) {
  return "shape" + std::to_string(shape_index(id) + 1);
}

std::size_t placement_count(const GridSpec& spec, ShapeId shape) {
  const BlockShape& s = shape_of(shape);
  const int cols = std::max(0, spec.n_time - s.time_extent + 1);
  const int rows = std::max(0, spec.n_freq - s.freq_extent + 1);
  return static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows);
}

std::vector<Block> enumerate_blocks(const GridSpec& spec, std::span<const ShapeId> shapes) {
  spec.validate();
  std::vector<ShapeId> order(shapes.begin(), shapes.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  std::vector<Block> blocks;
  const double slot_ms = spec.slot_duration_ms();
  for (ShapeId id : order) {
    const BlockShape& s = shape_of(id);
    for (int row = 0; row + s.freq_extent <= spec.n_freq; ++row) {
      for (int col = 0; col + s.time_extent <= spec.n_time; ++col) {
        Block b;
        b.block_id = static_cast<int>(blocks.size());
        b.shape = id;
        b.origin = {col, row};
        int n = 0;
        for (int f = row; f < row + s.freq_extent; ++f) {
          for (int t = col; t < col + s.time_extent; ++t) {
            b.minislots[n++] = spec.minislot_index(t, f);
          }
        }
        std::sort(b.minislots.begin(), b.minislots.end());
        b.end_time_ms = (col + s.time_extent) * slot_ms;
        blocks.push_back(b);
      }
    }
  }
  return blocks;
}

bool latency_feasible(const Block& block, double tau_ms) {
  return block.end_time_ms <= tau_ms + kLatencySlackMs;
}

bool ConflictStructure::covers(std::size_t b, std::size_t minislot) const {
  const auto& slots = slots_of_block_[b];
  return std::find(slots.begin(), slots.end(), static_cast<int>(minislot)) != slots.end();
}

ConflictStructure build_conflicts(std::span<const Block> blocks, const GridSpec& spec) {
  ConflictStructure cs;
  const std::size_t n = blocks.size();
  cs.neighbors_.assign(n, {});
  cs.blocks_on_slot_.assign(static_cast<std::size_t>(spec.minislot_count()), {});
  cs.slots_of_block_.resize(n);
  cs.pair_.assign(n * n, 0);

  for (std::size_t b = 0; b < n; ++b) {
    cs.slots_of_block_[b] = blocks[b].minislots;
    for (int slot : blocks[b].minislots) {
      cs.blocks_on_slot_[static_cast<std::size_t>(slot)].push_back(static_cast<int>(b));
    }
  }
  for (const auto& on_slot : cs.blocks_on_slot_) {
    for (int b : on_slot) {
      for (int p : on_slot) {
        if (b != p) cs.pair_[static_cast<std::size_t>(b) * n + static_cast<std::size_t>(p)] = 1;
      }
    }
  }
  for (std::size_t b = 0; b < n; ++b) {
    auto& nb = cs.neighbors_[b];
    for (int slot : blocks[b].minislots) {
      for (int p : cs.blocks_on_slot_[static_cast<std::size_t>(slot)]) {
        if (static_cast<std::size_t>(p) != b) nb.push_back(p);
      }
    }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return cs;
}

}  // namespace gridsched
