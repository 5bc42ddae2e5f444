#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "gspc/association.hpp"
#include "gspc/scenario.hpp"

using namespace gspc;

namespace {

// Hand-built layout: K BSs with given antenna counts, L UEs, F carriers.
NetworkLayout tiny_layout(const std::vector<int>& antennas, int ues, int fcs) {
  NetworkLayout layout;
  for (std::size_t k = 0; k < antennas.size(); ++k) {
    BaseStation bs;
    bs.id = static_cast<int>(k);
    bs.antennas = antennas[k];
    layout.bss.push_back(bs);
  }
  for (int l = 0; l < ues; ++l) {
    UserEquipment ue;
    ue.id = l;
    layout.ues.push_back(ue);
  }
  for (int f = 0; f < fcs; ++f) {
    FrequencyCarrier fc;
    fc.id = f;
    layout.fcs.push_back(fc);
  }
  return layout;
}

LsfMap constant_map(int K, int L, int F, double g) {
  LsfMap map;
  map.gains.assign(F, Eigen::MatrixXd::Constant(K, L, g));
  return map;
}

}  // namespace

TEST_CASE("each BS serves its min(antennas, L) best UEs") {
  ScenarioConfig cfg;
  const auto layout = generate_scenario(cfg, 3);
  const auto lsf = build_lsf_map(layout);
  const auto a = initial_association(lsf, layout);
  for (int k = 0; k < layout.num_bs(); ++k) {
    CHECK(static_cast<int>(a.served[k].size()) ==
          std::min(layout.bss[k].antennas, layout.num_ue()));
    CHECK(std::is_sorted(a.served[k].begin(), a.served[k].end()));
    CHECK(std::adjacent_find(a.served[k].begin(), a.served[k].end()) ==
          a.served[k].end());
  }
}

TEST_CASE("served and servers are mutually consistent") {
  ScenarioConfig cfg;
  const auto layout = generate_scenario(cfg, 9);
  const auto lsf = build_lsf_map(layout);
  const auto a = initial_association(lsf, layout);
  for (int k = 0; k < layout.num_bs(); ++k)
    for (int l : a.served[k])
      CHECK(std::count(a.servers[l].begin(), a.servers[l].end(), k) == 1);
  for (int l = 0; l < layout.num_ue(); ++l)
    for (int k : a.servers[l])
      CHECK(std::count(a.served[k].begin(), a.served[k].end(), l) == 1);
  // Macros have 64 antennas, so every UE is served at the default scale.
  CHECK(a.dropped_ues.empty());
}

TEST_CASE("position maps are a bijection onto 0..size-1") {
  ScenarioConfig cfg;
  const auto layout = generate_scenario(cfg, 21);
  const auto lsf = build_lsf_map(layout);
  const auto a = initial_association(lsf, layout);
  int expect = 0;
  for (int k = 0; k < layout.num_bs(); ++k)
    expect += a.num_fc * static_cast<int>(a.served[k].size());
  REQUIRE(a.size == expect);

  std::vector<int> seen(a.size, 0);
  for (int k = 0; k < layout.num_bs(); ++k)
    for (int f = 0; f < a.num_fc; ++f)
      for (int i = 0; i < a.group_size(k); ++i) {
        const int p = a.position(k, f, i);
        REQUIRE(p >= 0);
        REQUIRE(p < a.size);
        ++seen[p];
        CHECK(a.pos_bs[p] == k);
        CHECK(a.pos_fc[p] == f);
        CHECK(a.pos_ue[p] == a.served[k][i]);
        CHECK(a.find_position(k, a.served[k][i], f) == p);
      }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));

  // (k, f) groups are contiguous runs of length group_size(k).
  for (int k = 0; k < layout.num_bs(); ++k)
    for (int f = 0; f < a.num_fc; ++f) {
      const int s = a.group_start(k, f);
      for (int i = 0; i < a.group_size(k); ++i) {
        CHECK(a.pos_bs[s + i] == k);
        CHECK(a.pos_fc[s + i] == f);
      }
    }
}

TEST_CASE("find_position returns -1 for unserved pairs") {
  auto layout = tiny_layout({1, 1}, 3, 1);
  auto map = constant_map(2, 3, 1, 1e-9);
  map.gains[0](0, 1) = 1e-3;  // both BSs prefer UE 1
  map.gains[0](1, 1) = 1e-3;
  const auto a = initial_association(map, layout);
  CHECK(a.served[0] == std::vector<int>{1});
  CHECK(a.served[1] == std::vector<int>{1});
  CHECK(a.servers[1] == std::vector<int>{0, 1});
  CHECK(a.dropped_ues == std::vector<int>{0, 2});
  CHECK(a.find_position(0, 0, 0) == -1);
  CHECK(a.find_position(0, 1, 0) == 0);
}

TEST_CASE("equal gains break ties toward the lower UE index") {
  auto layout = tiny_layout({2}, 3, 2);
  const auto map = constant_map(1, 3, 2, 1e-6);
  const auto a = initial_association(map, layout);
  CHECK(a.served[0] == std::vector<int>{0, 1});
}

TEST_CASE("ranking uses the mean dB gain across carriers") {
  // UE 0: -60 dB on both carriers (mean -60). UE 1: -20 and -120 (mean -70).
  // A linear-scale mean would prefer UE 1; the dB mean must prefer UE 0.
  auto layout = tiny_layout({1}, 2, 2);
  auto map = constant_map(1, 2, 2, 1e-6);
  map.gains[0](0, 1) = 1e-2;
  map.gains[1](0, 1) = 1e-12;
  const auto a = initial_association(map, layout);
  CHECK(a.served[0] == std::vector<int>{0});
}

TEST_CASE("association count bound matches hand-computed values") {
  // One 1-antenna BS, one carrier, 3 UEs: C(3,1) = 3.
  CHECK(association_count_bound({1}, 1, 3) == "3");
  // Two such BSs just double it.
  CHECK(association_count_bound({1, 1}, 1, 3) == "6");
  // No UEs: empty sum.
  CHECK(association_count_bound({1}, 1, 0) == "0");
  // N = [2, 3], F = 2, L = 5: 30 + 31 = 61.
  CHECK(association_count_bound({2, 3}, 2, 5) == "61");
  // Cap saturated at L = 70: sum_{n=1}^{70} C(70, n) = 2^70 - 1.
  CHECK(association_count_bound({70}, 1, 70) == "1180591620717411303423");
  // Default paper-scale layout: 3 * (2^15 - 1) + 15 * 22818.
  const auto layout = generate_scenario(ScenarioConfig{}, 1);
  CHECK(association_count_bound(layout) == "440571");
}
