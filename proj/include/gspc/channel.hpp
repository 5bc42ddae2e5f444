#pragma once

#include <Eigen/Core>
#include <vector>

#include "gspc/association.hpp"
#include "gspc/scenario.hpp"

namespace gspc {

// Uplink training schedule. UEs in the same reuse group of an FC share one
// pilot sequence and contaminate each other's estimates.
struct PilotPlan {
  std::vector<std::vector<int>> trained;   // per FC: U_FC,f (ascending)
  std::vector<std::vector<int>> pilot_of;  // per FC: pilot id per trained UE
  std::vector<double> tau;                 // tau_f [symbols]
};

// Orthogonal default: every served UE trains on every FC with a private
// pilot, tau_f = max(pilot_min, |U_FC,f|) capped below beta_2.
PilotPlan orthogonal_pilot_plan(const NetworkLayout& layout,
                                const Association& assoc);

// Copies plan pilot lengths into the layout FCs so downlink time fractions
// and estimation quality stay consistent.
void apply_pilot_plan(NetworkLayout& layout, const PilotPlan& plan);

// MMSE estimation quality delta_{k,l}^f in [0,1]; 0 for UEs not trained on f.
struct ChannelQuality {
  std::vector<Eigen::MatrixXd> delta;  // delta[f](k, l)

  double at(int k, int l, int f) const { return delta[f](k, l); }
};

// delta = tau*p*alpha / (tau*p*alpha + same-pilot contamination + W*sigma^2).
ChannelQuality estimation_quality(const LsfMap& lsf, const PilotPlan& plan,
                                  const NetworkLayout& layout);

// Model-based average-rate coefficients over power-vector positions.
//
// For UE l on FC f, position (k, j, f):
//   interference entry b[pos] = alpha_{k,l}^f          (j != l)
//   desired entry     a[pos]  = b[pos], except on l's own links (k in B_l,
//                     j = l) where a[pos] = alpha*(delta*(N_k - 1) + 1).
// diff = a - b is nonnegative and supported exactly on l's own links.
struct RateCoefficients {
  std::vector<std::vector<Eigen::VectorXd>> a;     // [l][f], length n
  std::vector<std::vector<Eigen::VectorXd>> b;     // [l][f]
  std::vector<std::vector<Eigen::VectorXd>> diff;  // a - b
  std::vector<double> noise_w;                     // W_f * sigma^2 [W]

  int num_ue() const { return static_cast<int>(a.size()); }
  int num_fc() const { return static_cast<int>(noise_w.size()); }
};

RateCoefficients build_rate_coefficients(const LsfMap& lsf,
                                         const ChannelQuality& quality,
                                         const Association& assoc,
                                         const NetworkLayout& layout);

// Average spectral efficiency of UE l on FC f [bit/s/Hz]:
// log2(n + a^T p) - log2(n + b^T p), evaluated as log1p(diff^T p/(n + b^T p)).
double avg_rate_fc(const Eigen::VectorXd& p, const RateCoefficients& coeffs,
                   int l, int f);

// Per-UE throughput [bit/s]: sum_f (1 - tau_f/beta_2f) W_f * avg_rate_fc.
double ue_rate(const Eigen::VectorXd& p, const RateCoefficients& coeffs,
               const NetworkLayout& layout, int l);

}  // namespace gspc
