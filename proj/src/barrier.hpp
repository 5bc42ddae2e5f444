#pragma once

// Internal log-barrier solver for the SCA subproblems. Not installed; the
// public surface lives in gspc/optimizer.hpp.
//
// Problem shape (already scaled by the caller):
//   minimize    lin^T x + sum_g w_g (sqrt(|x_g|^2 + mu^2) - mu)
//   subject to  g_r(x) >= 0        (concave rate surrogates)
//               budget_k - 1_k^T x >= 0
//               x >= 0
// with g_r(x) = sum_t kappa_t ln(noise_t + a_t^T x) + lin_r^T x + offset_r.
//
// The Newton system is block diagonal per FC (each log term's vector lives in
// one FC slice) plus a low-rank correction from the squared constraint
// gradients and the budget rows; it is solved per-block with a Woodbury step,
// with a dense LDLT fallback.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gspc::detail {

struct RateTermFc {
  int fc = 0;
  double kappa = 0.0;      // log-term weight
  double noise = 0.0;      // affine offset inside the log
  Eigen::VectorXd a_block; // coefficients over the FC block, length n_fc
};

struct RateConstraint {
  int ue = -1;  // original UE index, for dual scatter
  std::vector<RateTermFc> terms;
  Eigen::VectorXd lin;   // constant gradient part, full length n
  double offset = 0.0;   // constants minus scaled demand
};

struct GroupCone {
  int fc = 0;
  int start_in_block = 0;  // contiguous slice of the FC block
  int len = 0;
  double weight = 0.0;
};

struct InnerProblem {
  int n = 0;
  Eigen::VectorXd lin;                    // linear objective coefficients
  std::vector<RateConstraint> rates;
  Eigen::VectorXd budget;                 // per BS
  std::vector<std::vector<int>> bs_positions;
  std::vector<std::vector<int>> fc_positions;  // ascending within each FC
  std::vector<int> pos_fc;
  std::vector<int> pos_in_fc;
  std::vector<GroupCone> huber;           // smoothed l2,1 terms, may be empty
  double huber_mu = 1e-8;

  int num_fc() const { return static_cast<int>(fc_positions.size()); }
  double objective(const Eigen::VectorXd& x) const;
};

struct BarrierOptions {
  double t0 = 1.0;
  double mu = 10.0;
  double newton_tol = 1e-9;  // stage stop on half the squared Newton decrement
  int max_newton = 60;
  double tol_rel = 1e-8;     // duality-measure stop, relative to |objective|
  bool force_dense = false;
};

struct BarrierResult {
  Eigen::VectorXd x;
  Eigen::VectorXd rate_dual;    // 1/(t g_r), aligned with rates[]
  Eigen::VectorXd budget_dual;  // 1/(t h_k)
  Eigen::VectorXd pos_dual;     // 1/(t x_i)
  double t_final = 0.0;
  int newton_steps = 0;
  bool ok = false;
  std::string note;
};

// x0 must be strictly feasible (all slacks positive). When a late stage can
// no longer be centered (the 1/x^2 curvature outruns the Newton solve), the
// result rolls back to the deepest well-centered stage instead of failing,
// provided that stage is within a few decades of the target measure; x and
// the duals always describe the same stage.
BarrierResult minimize_barrier(const InnerProblem& prob,
                               const Eigen::VectorXd& x0,
                               const BarrierOptions& opt);

// Phase-I helper: maximize the minimum rate surplus s over (x, s) with
// g_r(x) - s >= 0, budgets and x >= 0. Ignores the objective terms of prob.
struct PhaseIResult {
  Eigen::VectorXd x;
  double slack = 0.0;
  bool ok = false;
  std::string note;
};
PhaseIResult maximize_min_slack(const InnerProblem& prob,
                                const Eigen::VectorXd& x0,
                                const BarrierOptions& opt);

}  // namespace gspc::detail
