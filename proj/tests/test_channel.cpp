#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gspc/channel.hpp"
#include "gspc/rng.hpp"

using namespace gspc;

namespace {

struct Fixture {
  NetworkLayout layout;
  LsfMap lsf;
  Association assoc;
  PilotPlan plan;
  ChannelQuality quality;
  RateCoefficients coeffs;

  explicit Fixture(std::uint64_t seed) {
    layout = generate_scenario(ScenarioConfig{}, seed);
    lsf = build_lsf_map(layout);
    assoc = initial_association(lsf, layout);
    plan = orthogonal_pilot_plan(layout, assoc);
    apply_pilot_plan(layout, plan);
    quality = estimation_quality(lsf, plan, layout);
    coeffs = build_rate_coefficients(lsf, quality, assoc, layout);
  }
};

// Single BS / single UE / single FC with a pinned gain.
struct OneLink {
  NetworkLayout layout;
  LsfMap lsf;
  Association assoc;

  explicit OneLink(double alpha, int antennas = 1) {
    BaseStation bs;
    bs.antennas = antennas;
    layout.bss.push_back(bs);
    layout.ues.push_back(UserEquipment{});
    layout.fcs.push_back(FrequencyCarrier{});
    lsf.gains.assign(1, Eigen::MatrixXd::Constant(1, 1, alpha));
    assoc = initial_association(lsf, layout);
  }
};

}  // namespace

TEST_CASE("orthogonal plan trains every served UE with a private pilot") {
  Fixture fx(31);
  for (int f = 0; f < fx.layout.num_fc(); ++f) {
    CHECK(static_cast<int>(fx.plan.trained[f].size()) == fx.layout.num_ue());
    // private pilots: all distinct
    auto pilots = fx.plan.pilot_of[f];
    std::sort(pilots.begin(), pilots.end());
    CHECK(std::adjacent_find(pilots.begin(), pilots.end()) == pilots.end());
    CHECK(fx.plan.tau[f] == 15.0);  // max(pilot_min 8, 15 UEs)
    CHECK(fx.layout.fcs[f].pilot_length == 15.0);  // applied back
  }
}

TEST_CASE("pilot length is floored at pilot_min and capped below beta_2") {
  OneLink one(1e-6);
  auto plan = orthogonal_pilot_plan(one.layout, one.assoc);
  CHECK(plan.tau[0] == 8.0);  // one UE, floor dominates
  one.layout.config.pilot_min = 1e6;
  plan = orthogonal_pilot_plan(one.layout, one.assoc);
  CHECK(plan.tau[0] == one.layout.fcs[0].coherence_symbols - 1.0);
}

TEST_CASE("contamination-free quality matches the closed form") {
  // tau p alpha = 8 * 0.2 * 1e-6 = 1.6e-6 W against W sigma^2 = 7.96e-14 W.
  OneLink one(1e-6);
  const auto plan = orthogonal_pilot_plan(one.layout, one.assoc);
  const auto q = estimation_quality(one.lsf, plan, one.layout);
  CHECK(1.0 - q.at(0, 0, 0) ==
        doctest::Approx(4.9763393850099646e-08).epsilon(1e-9));
}

TEST_CASE("quality lies in [0,1] and is zero for untrained UEs") {
  Fixture fx(57);
  for (int f = 0; f < fx.layout.num_fc(); ++f) {
    CHECK((fx.quality.delta[f].array() >= 0.0).all());
    CHECK((fx.quality.delta[f].array() <= 1.0).all());
  }
  // Empty plan: nobody trained, delta identically zero.
  PilotPlan empty;
  empty.trained.resize(fx.layout.num_fc());
  empty.pilot_of.resize(fx.layout.num_fc());
  empty.tau.assign(fx.layout.num_fc(), 8.0);
  const auto q = estimation_quality(fx.lsf, empty, fx.layout);
  for (int f = 0; f < fx.layout.num_fc(); ++f)
    CHECK((q.delta[f].array() == 0.0).all());
}

TEST_CASE("shared pilots degrade quality, longer pilots improve it") {
  NetworkLayout layout;
  BaseStation bs;
  layout.bss.push_back(bs);
  layout.ues.resize(2);
  layout.ues[1].id = 1;
  layout.fcs.push_back(FrequencyCarrier{});
  LsfMap lsf;
  lsf.gains.assign(1, Eigen::MatrixXd::Constant(1, 2, 0.0));
  lsf.gains[0](0, 0) = 1e-9;
  lsf.gains[0](0, 1) = 2e-9;

  PilotPlan shared;
  shared.trained = {{0, 1}};
  shared.pilot_of = {{0, 0}};
  shared.tau = {8.0};
  PilotPlan priv = shared;
  priv.pilot_of = {{0, 1}};

  const auto qs = estimation_quality(lsf, shared, layout);
  const auto qp = estimation_quality(lsf, priv, layout);
  CHECK(qs.at(0, 0, 0) < qp.at(0, 0, 0));
  CHECK(qs.at(0, 1, 0) < qp.at(0, 1, 0));

  // Exact contamination arithmetic for the shared case.
  const double tau = 8.0, p = 0.2;
  const double own = tau * p * 1e-9;
  const double cont = tau * p * 2e-9;
  const double noise = layout.fcs[0].bandwidth * layout.noise_density;
  CHECK(qs.at(0, 0, 0) == doctest::Approx(own / (own + cont + noise)));

  PilotPlan longer = shared;
  longer.tau = {64.0};
  const auto ql = estimation_quality(lsf, longer, layout);
  CHECK(ql.at(0, 0, 0) > qs.at(0, 0, 0));
}

TEST_CASE("rate coefficient support: diff only on own links") {
  Fixture fx(101);
  const auto& a = fx.assoc;
  for (int l = 0; l < fx.layout.num_ue(); ++l)
    for (int f = 0; f < fx.layout.num_fc(); ++f) {
      const auto& diff = fx.coeffs.diff[l][f];
      const auto& b = fx.coeffs.b[l][f];
      CHECK((diff.array() >= 0.0).all());
      for (int pos = 0; pos < a.size; ++pos) {
        const bool own = a.pos_fc[pos] == f && a.pos_ue[pos] == l;
        const bool same_fc = a.pos_fc[pos] == f;
        if (own) {
          CHECK(diff[pos] > 0.0);
          CHECK(b[pos] == 0.0);
          // beamforming gain multiplies the raw LSF gain
          const int k = a.pos_bs[pos];
          const double alpha = fx.lsf.gain(k, l, f);
          const double delta = fx.quality.at(k, l, f);
          CHECK(fx.coeffs.a[l][f][pos] ==
                doctest::Approx(alpha *
                                (delta * (fx.layout.bss[k].antennas - 1) + 1.0)));
        } else if (same_fc) {
          CHECK(diff[pos] == 0.0);
          CHECK(b[pos] == fx.lsf.gain(a.pos_bs[pos], l, f));
        } else {
          CHECK(diff[pos] == 0.0);
          CHECK(b[pos] == 0.0);
        }
      }
    }
}

TEST_CASE("rate equals the difference-of-logs form") {
  Fixture fx(7);
  Rng rng(99);
  Eigen::VectorXd p(fx.assoc.size);
  for (int i = 0; i < p.size(); ++i) p[i] = rng.uniform(0.0, 0.5);
  for (int l = 0; l < fx.layout.num_ue(); ++l)
    for (int f = 0; f < fx.layout.num_fc(); ++f) {
      const double noise = fx.coeffs.noise_w[f];
      const double direct =
          std::log2(noise + fx.coeffs.a[l][f].dot(p)) -
          std::log2(noise + fx.coeffs.b[l][f].dot(p));
      CHECK(avg_rate_fc(p, fx.coeffs, l, f) ==
            doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("rate is monotone in own power and decreasing in interference") {
  Fixture fx(13);
  Eigen::VectorXd p = Eigen::VectorXd::Constant(fx.assoc.size, 1e-3);
  const int l = 0;
  const int f = 0;
  const double base = avg_rate_fc(p, fx.coeffs, l, f);
  // bump own link
  int own_pos = -1, other_pos = -1;
  for (int pos = 0; pos < fx.assoc.size; ++pos) {
    if (fx.assoc.pos_fc[pos] != f) continue;
    if (fx.assoc.pos_ue[pos] == l) own_pos = pos;
    else other_pos = pos;
  }
  REQUIRE(own_pos >= 0);
  REQUIRE(other_pos >= 0);
  Eigen::VectorXd up = p;
  up[own_pos] += 1e-3;
  CHECK(avg_rate_fc(up, fx.coeffs, l, f) > base);
  Eigen::VectorXd interf = p;
  interf[other_pos] += 1e-3;
  CHECK(avg_rate_fc(interf, fx.coeffs, l, f) < base);
}

TEST_CASE("unit-SNR single link yields 19.2 Mbit/s throughput") {
  // fraction (1 - 8/200) * 20 MHz * log2(2) = 19.2e6 bit/s.
  OneLink one(1e-6);
  auto layout = one.layout;
  const auto plan = orthogonal_pilot_plan(layout, one.assoc);
  apply_pilot_plan(layout, plan);
  const auto q = estimation_quality(one.lsf, plan, layout);
  const auto coeffs = build_rate_coefficients(one.lsf, q, one.assoc, layout);
  const double noise = coeffs.noise_w[0];
  Eigen::VectorXd p(1);
  p[0] = noise / coeffs.a[0][0][0];  // SNR exactly 1
  CHECK(ue_rate(p, coeffs, layout, 0) ==
        doctest::Approx(19.2e6).epsilon(1e-12));
}

TEST_CASE("zero power means zero rate") {
  Fixture fx(3);
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(fx.assoc.size);
  for (int l = 0; l < fx.layout.num_ue(); ++l)
    CHECK(ue_rate(p, fx.coeffs, fx.layout, l) == 0.0);
}
