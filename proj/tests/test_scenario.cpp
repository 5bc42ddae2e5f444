#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gspc/rng.hpp"
#include "gspc/scenario.hpp"

using namespace gspc;

namespace {

std::string serialize(const NetworkLayout& l) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& b : l.bss)
    os << b.id << ' ' << static_cast<int>(b.cls) << ' ' << b.position.x() << ' '
       << b.position.y() << ' ' << b.antennas << ' ' << b.p_max << ' '
       << b.p_sleep0 << ' ' << b.pa_efficiency << '\n';
  for (const auto& u : l.ues)
    os << u.id << ' ' << u.position.x() << ' ' << u.position.y() << ' '
       << u.rate_demand << ' ' << u.uplink_train_power << '\n';
  for (const auto& f : l.fcs)
    os << f.id << ' ' << f.center_frequency << ' ' << f.bandwidth << ' '
       << f.pilot_length << ' ' << f.coherence_symbols << ' ' << f.lsf_symbols
       << '\n';
  return os.str();
}

std::string serialize(const LsfMap& m) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& g : m.gains) os << g << '\n';
  return os.str();
}

}  // namespace

TEST_CASE("default paper-scale scenario has 18 BSs and 15 UEs") {
  const auto layout = generate_scenario(ScenarioConfig{}, 7);
  CHECK(layout.num_bs() == 18);
  CHECK(layout.num_ue() == 15);
  CHECK(layout.num_fc() == 2);
  int macros = 0;
  for (const auto& b : layout.bss)
    if (b.cls == BsClass::macro) ++macros;
  CHECK(macros == 3);
  // Table-I parameters land on the right classes.
  CHECK(layout.bss.front().p_max == 40.0);
  CHECK(layout.bss.back().p_max == 1.0);
  CHECK(layout.bss.front().p_sleep0 == 75.0);
  CHECK(layout.bss.back().p_sleep0 == 4.3);
  // Band centers for the unsplit 2-FC default.
  CHECK(layout.fcs[0].center_frequency == doctest::Approx(793e6));
  CHECK(layout.fcs[1].center_frequency == doctest::Approx(1910e6));
}

TEST_CASE("degenerate single-macro empty layout is valid") {
  ScenarioConfig cfg;
  cfg.macro_cells = 1;
  cfg.picos_per_cell = 0;
  cfg.ues_per_cell = 0;
  const auto layout = generate_scenario(cfg, 1);
  CHECK(layout.num_bs() == 1);
  CHECK(layout.num_ue() == 0);
}

TEST_CASE("invalid configs are rejected") {
  ScenarioConfig cfg;
  cfg.macro_cells = 0;
  CHECK_THROWS_AS(generate_scenario(cfg, 1), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.cell_radius = -5.0;
  CHECK_THROWS_AS(generate_scenario(cfg, 1), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.fc_count = 3;  // not a multiple of the two bands
  CHECK_THROWS_AS(generate_scenario(cfg, 1), std::invalid_argument);
}

TEST_CASE("same config and seed give byte-identical layouts and maps") {
  ScenarioConfig cfg;
  const auto a = generate_scenario(cfg, 42);
  const auto b = generate_scenario(cfg, 42);
  CHECK(serialize(a) == serialize(b));
  CHECK(serialize(build_lsf_map(a)) == serialize(build_lsf_map(b)));
  const auto c = generate_scenario(cfg, 43);
  CHECK(serialize(a) != serialize(c));
}

TEST_CASE("pico and UE positions stay inside their hexagons") {
  ScenarioConfig cfg;
  const auto layout = generate_scenario(cfg, 11);
  const auto centers = hex_cell_centers(cfg.macro_cells, cfg.cell_radius);
  for (int c = 0; c < cfg.macro_cells; ++c)
    for (int i = 0; i < cfg.picos_per_cell; ++i) {
      const auto& bs = layout.bss[cfg.macro_cells + c * cfg.picos_per_cell + i];
      CHECK(inside_hexagon(bs.position, centers[c], cfg.cell_radius));
    }
  for (const auto& ue : layout.ues) {
    CHECK(inside_hexagon(ue.position, centers[ue.cell], cfg.cell_radius));
    for (const auto& bs : layout.bss) {
      const double d_min =
          bs.cls == BsClass::macro ? cfg.macro_min_dist : cfg.pico_min_dist;
      CHECK((bs.position - ue.position).norm() >= d_min);
    }
  }
}

TEST_CASE("adjacent hexagon centers are sqrt(3) radii apart") {
  const auto centers = hex_cell_centers(3, 250.0);
  REQUIRE(centers.size() == 3);
  const double s = std::sqrt(3.0) * 250.0;
  CHECK((centers[1] - centers[0]).norm() == doctest::Approx(s));
  CHECK((centers[2] - centers[0]).norm() == doctest::Approx(s));
  CHECK((centers[2] - centers[1]).norm() == doctest::Approx(s));
}

TEST_CASE("path loss decreases with distance and with frequency") {
  ScenarioConfig cfg;
  BaseStation bs;
  bs.cls = BsClass::macro;
  bs.position = {0.0, 0.0};
  FrequencyCarrier low;
  low.center_frequency = 793e6;
  FrequencyCarrier high;
  high.center_frequency = 1910e6;
  UserEquipment near, far;
  near.position = {100.0, 0.0};
  far.position = {400.0, 0.0};
  CHECK(path_loss(bs, far, low, 0.0, cfg) < path_loss(bs, near, low, 0.0, cfg));
  CHECK(path_loss(bs, near, high, 0.0, cfg) < path_loss(bs, near, low, 0.0, cfg));
  bs.cls = BsClass::pico;
  CHECK(path_loss(bs, far, low, 0.0, cfg) < path_loss(bs, near, low, 0.0, cfg));
  CHECK(path_loss(bs, near, high, 0.0, cfg) < path_loss(bs, near, low, 0.0, cfg));
}

TEST_CASE("macro path loss at 1 km / 793 MHz matches the frozen value") {
  // 128.1 + 37.6 log10(1) + 20 log10(0.793/2) = 120.06486 dB.
  ScenarioConfig cfg;
  BaseStation bs;
  bs.cls = BsClass::macro;
  bs.position = {0.0, 0.0};
  UserEquipment ue;
  ue.position = {1000.0, 0.0};
  FrequencyCarrier fc;
  fc.center_frequency = 793e6;
  CHECK(path_loss(bs, ue, fc, 0.0, cfg) ==
        doctest::Approx(9.851755311131825e-13).epsilon(1e-9));
  // pico at 120 m / 1910 MHz
  bs.cls = BsClass::pico;
  ue.position = {120.0, 0.0};
  fc.center_frequency = 1910e6;
  CHECK(path_loss(bs, ue, fc, 0.0, cfg) ==
        doctest::Approx(2.2356205026743584e-11).epsilon(1e-9));
}

TEST_CASE("distance below the class minimum is clamped") {
  ScenarioConfig cfg;
  BaseStation bs;
  bs.cls = BsClass::macro;
  bs.position = {0.0, 0.0};
  UserEquipment at_min, closer;
  at_min.position = {cfg.macro_min_dist, 0.0};
  closer.position = {1.0, 0.0};
  FrequencyCarrier fc;
  fc.center_frequency = 793e6;
  CHECK(path_loss(bs, closer, fc, 0.0, cfg) ==
        doctest::Approx(path_loss(bs, at_min, fc, 0.0, cfg)));
}

TEST_CASE("LSF map is positive, finite, frequency-dependent") {
  ScenarioConfig cfg;
  cfg.macro_cells = 1;
  cfg.picos_per_cell = 0;
  cfg.ues_per_cell = 1;
  const auto layout = generate_scenario(cfg, 5);
  const auto map = build_lsf_map(layout);
  REQUIRE(map.num_fc() == 2);
  CHECK(map.gain(0, 0, 0) > 0.0);
  CHECK(map.gain(0, 0, 1) > 0.0);
  CHECK(map.gain(0, 0, 0) != map.gain(0, 0, 1));

  const auto big = generate_scenario(ScenarioConfig{}, 5);
  const auto big_map = build_lsf_map(big);
  for (int f = 0; f < big_map.num_fc(); ++f) {
    CHECK((big_map.gains[f].array() > 0.0).all());
    CHECK(big_map.gains[f].allFinite());
  }
}

TEST_CASE("shadowing is shared across FCs per (BS, UE) pair") {
  // With one shadowing draw per pair, the cross-FC gain ratio must equal the
  // deterministic path-loss ratio (shadowing cancels).
  ScenarioConfig cfg;
  const auto layout = generate_scenario(cfg, 17);
  const auto map = build_lsf_map(layout);
  for (int k = 0; k < layout.num_bs(); ++k)
    for (int l = 0; l < layout.num_ue(); ++l) {
      const double got = map.gain(k, l, 0) / map.gain(k, l, 1);
      const double want =
          path_loss(layout.bss[k], layout.ues[l], layout.fcs[0], 0.0, cfg) /
          path_loss(layout.bss[k], layout.ues[l], layout.fcs[1], 0.0, cfg);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("rng streams are deterministic and uniform-ish") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  Rng c(7);
  double acc = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) acc += c.normal();
  CHECK(std::abs(acc / n) < 0.05);  // mean of 20k standard normals
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
}
