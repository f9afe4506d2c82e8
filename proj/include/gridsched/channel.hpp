#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridsched/grid.hpp"

namespace gridsched {

enum class ServiceClass : std::uint8_t { Urllc, Embb };

struct Service {
  int service_id = 0;
  ServiceClass cls = ServiceClass::Embb;
  double q_kbps = 0.0;  // demand; meaningful for URLLC only
  double tau_ms = 0.0;  // latency tolerance
};

struct UrllcParams {
  double q_kbps;
  double tau_ms;
};

// Services indexed densely by k. URLLC services come first, in the order given,
// followed by the eMBB services; service_id equals the index.
class ServiceSet {
 public:
  ServiceSet() = default;
  ServiceSet(std::span<const UrllcParams> urllc, int embb_count, double embb_tau_ms);

  std::size_t size() const { return services_.size(); }
  const Service& operator[](std::size_t k) const { return services_[k]; }
  std::span<const Service> all() const { return services_; }
  std::span<const int> urllc() const { return urllc_; }
  std::span<const int> embb() const { return embb_; }
  bool is_urllc(std::size_t k) const { return services_[k].cls == ServiceClass::Urllc; }

 private:
  std::vector<Service> services_;
  std::vector<int> urllc_;
  std::vector<int> embb_;
};

struct SnrRange {
  double lo_db = 5.0;
  double hi_db = 30.0;
};

// Per-(service, frequency row) SNR in dB, constant across time columns.
struct SnrRealization {
  std::size_t n_services = 0;
  std::size_t n_freq = 0;
  std::uint64_t seed = 0;
  std::vector<double> snr_db;  // row-major [k][f]

  double at(std::size_t k, std::size_t f) const { return snr_db[k * n_freq + f]; }
  double& at(std::size_t k, std::size_t f) { return snr_db[k * n_freq + f]; }
};

// Draws use std::mt19937_64 seeded with `seed`; each 64-bit output x maps to
// lo + (hi - lo) * (x >> 11) * 2^-53, filled service-major then by row.
// Both steps are fully specified, so realizations are portable.
SnrRealization sample_snr(const ServiceSet& services, const GridSpec& spec, SnrRange range,
                          std::uint64_t seed);

// Uniform double in [0, 1) from a raw 64-bit draw, using the top 53 bits.
double unit_interval(std::uint64_t raw);

// Per-shape efficiency factors applied to Shannon capacity.
struct ThroughputModel {
  std::array<double, kShapeCount> efficiency{0.95, 0.93, 0.90, 0.90};

  // Throws std::invalid_argument unless every factor lies in (0, 1].
  void validate() const;
};

class ThroughputMatrix {
 public:
  ThroughputMatrix() = default;
  ThroughputMatrix(std::size_t n_blocks, std::size_t n_services)
      : n_blocks_(n_blocks), n_services_(n_services), r_(n_blocks * n_services, 0.0) {}

  std::size_t block_count() const { return n_blocks_; }
  std::size_t service_count() const { return n_services_; }
  double at(std::size_t b, std::size_t k) const { return r_[b * n_services_ + k]; }
  double& at(std::size_t b, std::size_t k) { return r_[b * n_services_ + k]; }
  std::span<const double> row(std::size_t b) const {
    return {r_.data() + b * n_services_, n_services_};
  }

  friend bool operator==(const ThroughputMatrix&, const ThroughputMatrix&) = default;

 private:
  std::size_t n_blocks_ = 0;
  std::size_t n_services_ = 0;
  std::vector<double> r_;
};

// Bits one mini-slot carries at the given linear SNR, before efficiency.
double minislot_bits(const GridSpec& spec, double snr_linear);

// r[b][k] in kbps: efficiency(shape) * sum over covered mini-slots of
// W0 * T0 * log2(1 + snr) divided by the window. URLLC entries are zeroed
// where the block misses the service's latency tolerance.
ThroughputMatrix throughput_matrix(const SnrRealization& snr, std::span<const Block> blocks,
                                   const ServiceSet& services, const GridSpec& spec,
                                   const ThroughputModel& model = {});

}  // namespace gridsched
