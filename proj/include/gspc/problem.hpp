#pragma once

#include <Eigen/Core>
#include <vector>

#include "gspc/channel.hpp"
#include "gspc/power_model.hpp"

namespace gspc {

// Data bundle for the energy-minimization solvers.
//
// The backhaul power term is constant once the demands are fixed, so it never
// enters an optimization objective; it is re-added only when reporting exact
// totals. All quantities are in SI units (W, bit/s); solvers rescale
// internally.
struct ProblemInstance {
  RateCoefficients coeffs;
  Eigen::VectorXd demands;          // per UE [bit/s], >= 0
  Eigen::VectorXd budgets;          // per BS [W], > 0
  Eigen::MatrixXd sp_weights;       // (K, F) group wake cost [W], >= 0
  Eigen::VectorXd transmit_weight;  // per position: (1 - tau_f/beta_2f)/eta_k
  double epsilon = 1e-5;            // sparsity smoothing scale [W]
  Association assoc;
  NetworkLayout layout;
  PowerModelParams power;

  // UEs with positive demand and at least one serving BS; only these carry
  // rate constraints.
  std::vector<int> constrained;
  // True when some UE has positive demand but no server at all; no power
  // vector can satisfy it.
  bool unservable_demand = false;

  int num_positions() const { return assoc.size; }
  int num_bs() const { return layout.num_bs(); }
  int num_ue() const { return layout.num_ue(); }
  int num_fc() const { return layout.num_fc(); }
};

// Assembles the instance from the scenario pipeline outputs. Demands and
// training fractions come from the layout (pilot lengths must already be
// synced via apply_pilot_plan). Throws std::invalid_argument when invariants
// fail (negative demand, nonpositive budget, tau >= beta_2, bad epsilon).
ProblemInstance build_problem(const NetworkLayout& layout,
                              const Association& assoc,
                              const RateCoefficients& coeffs,
                              const PowerModelParams& params);

}  // namespace gspc
