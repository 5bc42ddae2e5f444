#include "gspc/channel.hpp"

#include <algorithm>
#include <cmath>

namespace gspc {

PilotPlan orthogonal_pilot_plan(const NetworkLayout& layout,
                                const Association& assoc) {
  const int F = layout.num_fc();
  const int L = layout.num_ue();
  std::vector<char> is_dropped(L, 0);
  for (int l : assoc.dropped_ues) is_dropped[l] = 1;

  PilotPlan plan;
  plan.trained.resize(F);
  plan.pilot_of.resize(F);
  plan.tau.resize(F);
  for (int f = 0; f < F; ++f) {
    for (int l = 0; l < L; ++l)
      if (!is_dropped[l]) plan.trained[f].push_back(l);
    plan.pilot_of[f].resize(plan.trained[f].size());
    for (std::size_t i = 0; i < plan.trained[f].size(); ++i)
      plan.pilot_of[f][i] = static_cast<int>(i);
    const double want = std::max(layout.config.pilot_min,
                                 static_cast<double>(plan.trained[f].size()));
    plan.tau[f] = std::min(want, layout.fcs[f].coherence_symbols - 1.0);
  }
  return plan;
}

void apply_pilot_plan(NetworkLayout& layout, const PilotPlan& plan) {
  for (int f = 0; f < layout.num_fc(); ++f)
    layout.fcs[f].pilot_length = plan.tau[f];
}

ChannelQuality estimation_quality(const LsfMap& lsf, const PilotPlan& plan,
                                  const NetworkLayout& layout) {
  const int K = layout.num_bs();
  const int L = layout.num_ue();
  const int F = layout.num_fc();
  ChannelQuality q;
  q.delta.assign(F, Eigen::MatrixXd::Zero(K, L));
  for (int f = 0; f < F; ++f) {
    const double noise = layout.fcs[f].bandwidth * layout.noise_density;
    const auto& trained = plan.trained[f];
    const auto& pilots = plan.pilot_of[f];
    for (int k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < trained.size(); ++i) {
        const int l = trained[i];
        const double own = plan.tau[f] * layout.ues[l].uplink_train_power *
                           lsf.gain(k, l, f);
        double contamination = 0.0;
        for (std::size_t j = 0; j < trained.size(); ++j) {
          if (j == i || pilots[j] != pilots[i]) continue;
          contamination += plan.tau[f] *
                           layout.ues[trained[j]].uplink_train_power *
                           lsf.gain(k, trained[j], f);
        }
        q.delta[f](k, l) = own > 0.0 ? own / (own + contamination + noise) : 0.0;
      }
    }
  }
  return q;
}

RateCoefficients build_rate_coefficients(const LsfMap& lsf,
                                         const ChannelQuality& quality,
                                         const Association& assoc,
                                         const NetworkLayout& layout) {
  const int L = layout.num_ue();
  const int F = layout.num_fc();
  const int n = assoc.size;

  RateCoefficients c;
  c.noise_w.resize(F);
  for (int f = 0; f < F; ++f)
    c.noise_w[f] = layout.fcs[f].bandwidth * layout.noise_density;

  c.a.assign(L, std::vector<Eigen::VectorXd>(F));
  c.b.assign(L, std::vector<Eigen::VectorXd>(F));
  c.diff.assign(L, std::vector<Eigen::VectorXd>(F));
  for (int l = 0; l < L; ++l) {
    for (int f = 0; f < F; ++f) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
      for (int pos = 0; pos < n; ++pos) {
        if (assoc.pos_fc[pos] != f) continue;
        const int k = assoc.pos_bs[pos];
        const double alpha = lsf.gain(k, l, f);
        if (assoc.pos_ue[pos] == l) {
          // own link: beamforming gain delta*(N_k - 1) + 1
          const double delta = quality.at(k, l, f);
          a[pos] = alpha * (delta * (layout.bss[k].antennas - 1) + 1.0);
        } else {
          a[pos] = alpha;
          b[pos] = alpha;
        }
      }
      c.a[l][f] = a;
      c.b[l][f] = b;
      c.diff[l][f] = a - b;
    }
  }
  return c;
}

double avg_rate_fc(const Eigen::VectorXd& p, const RateCoefficients& coeffs,
                   int l, int f) {
  const double noise = coeffs.noise_w[f];
  const double interf = coeffs.b[l][f].dot(p);
  const double own = coeffs.diff[l][f].dot(p);
  return std::log1p(own / (noise + interf)) / std::log(2.0);
}

double ue_rate(const Eigen::VectorXd& p, const RateCoefficients& coeffs,
               const NetworkLayout& layout, int l) {
  double rate = 0.0;
  for (int f = 0; f < layout.num_fc(); ++f) {
    const auto& fc = layout.fcs[f];
    const double fraction = 1.0 - fc.pilot_length / fc.coherence_symbols;
    rate += fraction * fc.bandwidth * avg_rate_fc(p, coeffs, l, f);
  }
  return rate;
}

}  // namespace gspc
