#include <random>

#include "doctest.h"
#include "gridsched/channel.hpp"
#include "oracles.hpp"

using namespace gridsched;

namespace {

SnrRealization flat_snr(const ServiceSet& services, const GridSpec& g, double db) {
  SnrRealization snr;
  snr.n_services = services.size();
  snr.n_freq = static_cast<std::size_t>(g.n_freq);
  snr.snr_db.assign(snr.n_services * snr.n_freq, db);
  return snr;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("services are indexed URLLC first") {
  const std::vector<UrllcParams> u{{64, 1}, {128, 0.5}};
  const ServiceSet s(u, 3, 2.0);
  REQUIRE(s.size() == 5);
  CHECK(s.urllc().size() == 2);
  CHECK(s.embb().size() == 3);
  CHECK(s.is_urllc(1));
  CHECK_FALSE(s.is_urllc(2));
  CHECK(s[1].q_kbps == 128);
  CHECK(s[1].tau_ms == 0.5);
  CHECK(s[4].service_id == 4);
  CHECK_THROWS_AS(ServiceSet(std::vector<UrllcParams>{{0, 1}}, 1, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(ServiceSet(std::vector<UrllcParams>{{64, 0}}, 1, 2.0), std::invalid_argument);
}

TEST_CASE("SNR draws follow the documented mapping") {
  const GridSpec g{16, 11, 2.0, 2.0};
  const std::vector<UrllcParams> u{{64, 1}};
  const ServiceSet s(u, 2, 2.0);
  const auto snr = sample_snr(s, g, {5.0, 30.0}, 42);
  std::mt19937_64 gen(42);
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (std::size_t f = 0; f < 11; ++f) {
      const double x = static_cast<double>(gen() >> 11) / 9007199254740992.0;
      CHECK(snr.at(k, f) == 5.0 + 25.0 * x);
      CHECK(snr.at(k, f) >= 5.0);
      CHECK(snr.at(k, f) < 30.0);
    }
  }
  CHECK(sample_snr(s, g, {5.0, 30.0}, 42).snr_db == snr.snr_db);
  CHECK(sample_snr(s, g, {5.0, 30.0}, 43).snr_db != snr.snr_db);
  CHECK_THROWS_AS(sample_snr(s, g, {5.0, 5.0}, 1), std::invalid_argument);
}

TEST_CASE("unit interval endpoints") {
  CHECK(unit_interval(0) == 0.0);
  CHECK(unit_interval(~std::uint64_t{0}) < 1.0);
  CHECK(unit_interval(std::uint64_t{1} << 63) == 0.5);
}

TEST_CASE("block throughput at 30 dB, hand computed") {
  const GridSpec g;  // 16 x 11, 2 ms, 2 MHz
  const std::vector<UrllcParams> none;
  const ServiceSet s(none, 1, 2.0);
  const auto blocks = enumerate_blocks(g, kAllShapes);
  const auto tp = throughput_matrix(flat_snr(s, g, 30.0), blocks, s, g);
  // W0 T0 = (2e6 / 11) * 125e-6 = 22.7272... bits per unit spectral efficiency.
  const double per_slot = 2e6 / 11.0 * 125e-6 * std::log2(1001.0);
  const double shape3 = 0.90 * 4 * per_slot / 2e-3 / 1e3;
  const double shape1 = 0.95 * 4 * per_slot / 2e-3 / 1e3;
  CHECK(shape3 == doctest::Approx(407.8).epsilon(1e-3));
  CHECK(tp.at(0, 0) == doctest::Approx(shape1).epsilon(1e-12));
  CHECK(tp.at(blocks.size() - 1, 0) == doctest::Approx(shape3).epsilon(1e-12));
  CHECK(minislot_bits(g, 1000.0) == doctest::Approx(per_slot).epsilon(1e-12));
}

TEST_CASE("throughput sums per-row bits with the shape efficiency") {
  const GridSpec g{8, 6, 2.0, 2.0};
  const std::vector<UrllcParams> u{{64, 1.0}};
  const ServiceSet s(u, 2, 2.0);
  const auto snr = sample_snr(s, g, {5.0, 30.0}, 7);
  const auto blocks = enumerate_blocks(g, kAllShapes);
  const ThroughputModel model;
  const auto tp = throughput_matrix(snr, blocks, s, g, model);
  for (const Block& b : blocks) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      double bits = 0.0;
      for (int slot : b.minislots) bits += oracle::slot_bits(g, snr.at(k, static_cast<std::size_t>(slot / g.n_time)));
      double want = model.efficiency[shape_index(b.shape)] * bits / g.window_ms;
      if (s.is_urllc(k) && b.end_time_ms > 1.0 + 1e-9) want = 0.0;
      CHECK(tp.at(static_cast<std::size_t>(b.block_id), k) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("latency mask zeroes only late URLLC blocks") {
  const GridSpec g;
  const std::vector<UrllcParams> u{{64, 0.5}};
  const ServiceSet s(u, 1, 0.5);
  const auto blocks = enumerate_blocks(g, kAllShapes);
  const auto tp = throughput_matrix(flat_snr(s, g, 10.0), blocks, s, g);
  std::size_t masked = 0;
  for (const Block& b : blocks) {
    const bool late = b.end_time_ms > 0.5 + 1e-9;
    CHECK((tp.at(static_cast<std::size_t>(b.block_id), 0) == 0.0) == late);
    CHECK(tp.at(static_cast<std::size_t>(b.block_id), 1) > 0.0);  // eMBB is never masked
    masked += late;
  }
  CHECK(masked > 0);
}

TEST_CASE("efficiency factors are validated") {
  ThroughputModel m;
  CHECK_NOTHROW(m.validate());
  m.efficiency[2] = 0.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.efficiency[2] = 1.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

}
