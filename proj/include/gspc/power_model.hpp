#pragma once

#include <Eigen/Core>
#include <vector>

#include "gspc/association.hpp"
#include "gspc/scenario.hpp"

namespace gspc {

struct PowerModelParams {
  double macro_bb_ref = 5.8;  // P'_BB [W per antenna per 10 MHz]
  double macro_rf_ref = 1.0;  // P'_RF
  double pico_bb_ref = 0.5;
  double pico_rf_ref = 0.1;
  double haul_ref = 50.0;  // P_haul [W per 100 Mbit/s]
  double epsilon = 1e-5;   // sparsity smoothing scale, powers in Watts

  double sp_ref(BsClass cls) const {
    return cls == BsClass::macro ? macro_bb_ref + macro_rf_ref
                                 : pico_bb_ref + pico_rf_ref;
  }
};

// Signal-processing wake cost of group (k, f): N_k * (W_f/10 MHz) * (P'_BB +
// P'_RF). This is the mu_k entry weighting the (k, f) activity indicator.
double sp_weight(const BaseStation& bs, const FrequencyCarrier& fc,
                 const PowerModelParams& params);

enum class Grouping { per_bs, per_bs_fc, per_ue, per_ue_fc, per_fc };

// Position lists of every group under a grouping, in a fixed deterministic
// order (per_bs: k ascending; per_bs_fc: (k, f); per_ue: non-dropped l
// ascending; per_ue_fc: (l, f); per_fc: f).
std::vector<std::vector<int>> group_positions(const Association& assoc,
                                              Grouping grouping);

// Weighted group l0: sum_g w_g * [||x_g||_0 > 0]. weights must match the
// group count of the grouping (dimension error otherwise).
double group_sparsity(const Eigen::VectorXd& x, const Association& assoc,
                      Grouping grouping, const Eigen::VectorXd& weights);

// PA input power: sum_f (1 - tau_f/beta_2f) sum_k (1/eta_k) 1^T p_{k}^f.
double transmit_power_total(const Eigen::VectorXd& p,
                            const NetworkLayout& layout,
                            const Association& assoc);

// Exact model: sleep floors + sp-weighted (BS, FC) activity + PA power +
// P_haul * backhaul_bps / 100 Mbit/s. Callers pass achieved rates or demands
// (summed) as backhaul_bps.
double total_power_exact(const Eigen::VectorXd& p, const NetworkLayout& layout,
                         const Association& assoc,
                         const PowerModelParams& params, double backhaul_bps);

// Smooth surrogate: activity indicators replaced by
// log(1 + sum(x_g)/eps) / log(1 + 1/eps).
double total_power_smooth(const Eigen::VectorXd& p, const NetworkLayout& layout,
                          const Association& assoc,
                          const PowerModelParams& params, double backhaul_bps,
                          double eps);

// l2,1 relaxation: indicators replaced by w_g ||x_g||_2.
double total_power_l21(const Eigen::VectorXd& p, const NetworkLayout& layout,
                       const Association& assoc,
                       const PowerModelParams& params, double backhaul_bps);

}  // namespace gspc
