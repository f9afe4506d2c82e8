#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gridsched {

// Time-frequency mini-slot grid. The first axis is time (columns), the
// second is frequency (rows). Mini-slot index = freq_row * n_time + time_col.
struct GridSpec {
  int n_time = 16;
  int n_freq = 11;
  double window_ms = 2.0;
  double bandwidth_mhz = 2.0;

  // Throws std::invalid_argument when any dimension is non-positive.
  void validate() const;

  double slot_duration_ms() const { return window_ms / n_time; }
  double slot_bandwidth_mhz() const { return bandwidth_mhz / n_freq; }
  int minislot_count() const { return n_time * n_freq; }
  int minislot_index(int time_col, int freq_row) const {
    return freq_row * n_time + time_col;
  }
  int freq_row_of(int minislot) const { return minislot / n_time; }
  int time_col_of(int minislot) const { return minislot % n_time; }
};

enum class ShapeId : std::uint8_t { Shape1 = 0, Shape2 = 1, Shape3 = 2, Shape4 = 3 };

inline constexpr std::size_t kShapeCount = 4;
inline constexpr int kBlockSize = 4;

struct BlockShape {
  ShapeId id;
  int time_extent;
  int freq_extent;
};

// Shape1 is horizontal (4x1), Shape2 square (2x2), Shape3/Shape4 vertical
// (1x4). Shape3 and Shape4 share a footprint but are separate numerologies.
inline constexpr std::array<BlockShape, kShapeCount> kShapes{{
    {ShapeId::Shape1, 4, 1},
    {ShapeId::Shape2, 2, 2},
    {ShapeId::Shape3, 1, 4},
    {ShapeId::Shape4, 1, 4},
}};

inline constexpr const BlockShape& shape_of(ShapeId id) {
  return kShapes[static_cast<std::size_t>(id)];
}
inline constexpr std::size_t shape_index(ShapeId id) { return static_cast<std::size_t>(id); }
std::string shape_name(ShapeId id);

inline constexpr std::array<ShapeId, kShapeCount> kAllShapes{
    ShapeId::Shape1, ShapeId::Shape2, ShapeId::Shape3, ShapeId::Shape4};

struct Origin {
  int time_col = 0;
  int freq_row = 0;
  friend bool operator==(const Origin&, const Origin&) = default;
};

struct Block {
  int block_id = 0;
  ShapeId shape = ShapeId::Shape1;
  Origin origin;
  std::array<int, kBlockSize> minislots{};  // ascending
  double end_time_ms = 0.0;

  friend bool operator==(const Block&, const Block&) = default;
};

// Number of placements of `shape` on the grid; zero when it does not fit.
std::size_t placement_count(const GridSpec& spec, ShapeId shape);

// Every placement of every requested shape, ordered shape-major and then by
// origin in row-major order (frequency row outer, time column inner).
// block_id is the position in that ordering. Duplicate shapes are ignored.
std::vector<Block> enumerate_blocks(const GridSpec& spec, std::span<const ShapeId> shapes);

// True iff the block finishes within the latency tolerance.
bool latency_feasible(const Block& block, double tau_ms);

// Incidence and pairwise overlap structure of a block list.
class ConflictStructure {
 public:
  ConflictStructure() = default;

  std::size_t block_count() const { return neighbors_.size(); }
  std::size_t minislot_count() const { return blocks_on_slot_.size(); }

  bool conflicts(std::size_t b, std::size_t p) const {
    return pair_[b * neighbors_.size() + p] != 0;
  }
  // Blocks overlapping b, ascending, excluding b itself.
  std::span<const int> neighbors(std::size_t b) const { return neighbors_[b]; }
  // Blocks covering mini-slot i, ascending.
  std::span<const int> blocks_on(std::size_t minislot) const { return blocks_on_slot_[minislot]; }
  // a_{b,i}
  bool covers(std::size_t b, std::size_t minislot) const;
  std::size_t conflict_count(std::size_t b) const { return neighbors_[b].size(); }

  friend bool operator==(const ConflictStructure&, const ConflictStructure&) = default;

 private:
  friend ConflictStructure build_conflicts(std::span<const Block> blocks, const GridSpec& spec);

  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<int>> blocks_on_slot_;
  std::vector<std::array<int, kBlockSize>> slots_of_block_;
  std::vector<std::uint8_t> pair_;
};

ConflictStructure build_conflicts(std::span<const Block> blocks, const GridSpec& spec);

}  // namespace gridsched
