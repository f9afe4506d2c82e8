#include "gridsched/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gridsched {

ServiceSet::ServiceSet(std::span<const UrllcParams> urllc, int embb_count, double embb_tau_ms) {
  if (embb_count < 0) throw std::invalid_argument("eMBB service count must be non-negative");
  if (embb_count > 0 && !(embb_tau_ms > 0.0)) {
    throw std::invalid_argument("eMBB latency tolerance must be positive");
  }
  for (const UrllcParams& u : urllc) {
    if (!(u.q_kbps > 0.0)) throw std::invalid_argument("URLLC demand must be positive");
    if (!(u.tau_ms > 0.0)) throw std::invalid_argument("URLLC latency tolerance must be positive");
    const int k = static_cast<int>(services_.size());
    services_.push_back({k, ServiceClass::Urllc, u.q_kbps, u.tau_ms});
    urllc_.push_back(k);
  }
  for (int e = 0; e < embb_count; ++e) {
    const int k = static_cast<int>(services_.size());
    services_.push_back({k, ServiceClass::Embb, 0.0, embb_tau_ms});
    embb_.push_back(k);
  }
}

double unit_interval(std::uint64_t raw) {
  return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

SnrRealization sample_snr(const ServiceSet& services, const GridSpec& spec, SnrRange range,
                          std::uint64_t seed) {
  if (!(range.lo_db < range.hi_db)) {
    throw std::invalid_argument("SNR interval must satisfy lo < hi");
  }
  spec.validate();
  SnrRealization snr;
  snr.n_services = services.size();
  snr.n_freq = static_cast<std::size_t>(spec.n_freq);
  snr.seed = seed;
  snr.snr_db.resize(snr.n_services * snr.n_freq);
  std::mt19937_64 gen(seed);
  const double width = range.hi_db - range.lo_db;
  for (double& v : snr.snr_db) {
    v = range.lo_db + width * unit_interval(gen());
  }
  return snr;
}

void ThroughputModel::validate() const {
  for (double eta : efficiency) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("efficiency factors must lie in (0, 1]");
  }
}

double minislot_bits(const GridSpec& spec, double snr_linear) {
  const double w0_hz = spec.slot_bandwidth_mhz() * 1e6;
  const double t0_s = spec.slot_duration_ms() * 1e-3;
  return w0_hz * t0_s * std::log2(1.0 + snr_linear);
}

ThroughputMatrix throughput_matrix(const SnrRealization& snr, std::span<const Block> blocks,
                                   const ServiceSet& services, const GridSpec& spec,
                                   const ThroughputModel& model) {
  if (snr.n_services != services.size() || snr.n_freq != static_cast<std::size_t>(spec.n_freq)) {
    throw std::invalid_argument("SNR realization does not match services/grid");
  }
  model.validate();
  const std::size_t n_services = services.size();
  // Bits per mini-slot only depend on (service, row); cache them.
  std::vector<double> slot_bits(n_services * snr.n_freq);
  for (std::size_t k = 0; k < n_services; ++k) {
    for (std::size_t f = 0; f < snr.n_freq; ++f) {
      const double lin = std::pow(10.0, snr.at(k, f) / 10.0);
      slot_bits[k * snr.n_freq + f] = minislot_bits(spec, lin);
    }
  }
  const double window_s = spec.window_ms * 1e-3;

  ThroughputMatrix tp(blocks.size(), n_services);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Block& block = blocks[b];
    const double eta = model.efficiency[shape_index(block.shape)];
    for (std::size_t k = 0; k < n_services; ++k) {
      if (services.is_urllc(k) && !latency_feasible(block, services[k].tau_ms)) continue;
      double bits = 0.0;
      for (int slot : block.minislots) {
        bits += slot_bits[k * snr.n_freq + static_cast<std::size_t>(spec.freq_row_of(slot))];
      }
      tp.at(b, k) = eta * bits / window_s / 1e3;
    }
  }
  return tp;
}

}  // namespace gridsched
