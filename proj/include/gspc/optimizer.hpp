#pragma once

#include <string>
#include <vector>

#include "gspc/problem.hpp"

namespace gspc {

enum class Method { log_sparse, min_transmit_power, l21 };

struct SolverConfig {
  double eps_th = 1e-4;      // outer stop on ||p_i - p_{i-1}||_2 [W]
  int max_outer = 50;
  double barrier_t0 = 1.0;
  double barrier_mu = 10.0;
  // Per-stage stop on half the squared Newton decrement. Tight on purpose:
  // the dual extraction inherits the final gradient, so a loose centering
  // shows up directly in the stationarity certificate.
  double newton_tol = 1e-13;
  int max_newton = 200;
  double inner_tol_rel = 1e-8;  // duality measure of the final primal solve
  // Duality measure of the solves the SCA iterates on and reports duals
  // from. Moderate on purpose: extracted rate duals are 1/(t s), and past
  // this depth the computed slack of a tight rate constraint cancels to fp
  // noise, poisoning them. One deeper solve at inner_tol_rel then settles
  // the primal before thresholding. Nonpositive: iterate at inner_tol_rel
  // throughout.
  double dual_tol_rel = 1e-6;
  // Group sums below this are forced to zero after convergence; negative
  // means 1e-6 * min_k P_max.
  double group_off_threshold = -1.0;
  // After the eps_th stop fires, keep iterating (up to max_outer) while the
  // scaled stationarity residual exceeds this; <= 0 disables the refinement.
  double kkt_refine_target = 1e-6;
  bool polish = true;        // min-transmit re-solve on the thresholded support
  bool force_dense = false;  // bypass the structured Newton solve
};

struct DualVariables {
  Eigen::VectorXd zeta;   // per UE, rate constraints [W per bit/s]
  Eigen::VectorXd theta;  // per BS, budget constraints
  Eigen::VectorXd nu;     // per position, nonnegativity
};

struct KktResidual {
  // inf-norm of the stationarity defect, scaled by the inf-norm of the
  // objective gradient
  double stationarity = 0.0;
  // max |dual * slack| over all constraints, scaled by 1 + |objective|
  double complementarity = 0.0;
  // max relative primal violation (rates, budgets, nonnegativity)
  double feasibility = 0.0;
};

enum class SolveStatus { converged, max_iter, infeasible };

struct ActiveGroups {
  int per_bs = 0;
  int per_bs_fc = 0;
  int per_ue = 0;
  int per_ue_fc = 0;
  int per_fc = 0;
};

struct SolverReport {
  Eigen::VectorXd p_star;  // [W], post-processed
  // method objective per outer iteration, element 0 at the start point [W]
  std::vector<double> objective_trajectory;
  // Duals and KKT residuals certify the pre-threshold SCA fixed point; the
  // thresholding/polish step purposely moves p_star off that point.
  DualVariables duals;
  KktResidual kkt;
  Eigen::VectorXd achieved_rates;  // per UE at p_star [bit/s]
  ActiveGroups active_groups;      // active-group counts at p_star
  double total_power_exact = 0.0;  // at p_star, demand-sum backhaul [W]
  int iterations = 0;
  SolveStatus status = SolveStatus::converged;
  Method method = Method::log_sparse;
  std::string note;  // diagnostics for abnormal exits
};

// Concave smooth objective the SCA descends (natural log; no sleep or
// backhaul constants): sum_g w_g ln(eps + 1^T p_g) + c^T p for log_sparse,
// c^T p for min_transmit_power, sum_g w_g ||p_g|| + c^T p for l21.
double smooth_objective(const Eigen::VectorXd& p, const ProblemInstance& inst,
                        Method method = Method::log_sparse);

// Linearized sparsity objective: sum_g w_g (1^T p_g)/(eps + 1^T q_g) + c^T p.
double surrogate_objective(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                           const ProblemInstance& inst);
// Constants dropped by the linearization; surrogate + constant majorizes the
// smooth objective with equality at p = q.
double surrogate_constant(const Eigen::VectorXd& q,
                          const ProblemInstance& inst);

// Concave minorant of ue_rate: interference log linearized at q [bit/s].
double surrogate_rate(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                      const ProblemInstance& inst, int ue);

struct FeasibleStart {
  Eigen::VectorXd p0;
  bool feasible = false;
};

// Equal-split bisection on a common power scale, then one phase-I max-min
// slack pass if the split fails. p0 = 0 when every demand is zero.
FeasibleStart find_feasible_start(const ProblemInstance& inst,
                                  const SolverConfig& cfg);

struct InnerSolution {
  Eigen::VectorXd p;
  DualVariables duals;
};

// One convex subproblem at expansion point q (strictly feasible). Throws
// std::runtime_error with diagnostics on numerical failure.
InnerSolution solve_inner(const ProblemInstance& inst,
                          const Eigen::VectorXd& q, const SolverConfig& cfg);

// SCA descent from feasible p0 with the log-sparse objective.
SolverReport sca_solve(const ProblemInstance& inst, const Eigen::VectorXd& p0,
                       const SolverConfig& cfg);

// Baselines: same machinery, different objective. Both find their own start.
SolverReport solve_min_transmit_power(const ProblemInstance& inst,
                                      const SolverConfig& cfg);
SolverReport solve_l21(const ProblemInstance& inst, const SolverConfig& cfg);

// Start search plus dispatch on method.
SolverReport run_method(const ProblemInstance& inst, Method method,
                        const SolverConfig& cfg);

// First-order certification at (p, duals) against the named objective,
// using the true (unlinearized) rate gradients.
KktResidual kkt_residual(const Eigen::VectorXd& p, const DualVariables& duals,
                         const ProblemInstance& inst,
                         Method method = Method::log_sparse);

enum class Restriction {
  r2_one_ue_per_bs_fc,
  r3_one_bs_per_ue,
  r4_one_fc_per_ue,
  r5_one_ue_per_fc
};

// Enumerates the maximal support patterns the restriction allows (<= 4 BSs,
// <= 4 UEs, <= 2 FCs; throws std::length_error beyond that or past 4096
// patterns), solves each by sca_solve on the fixed support, and returns the
// best report (ties: lexicographically smallest active-group set).
SolverReport enumerate_restricted_optimum(const ProblemInstance& inst,
                                          Restriction restriction,
                                          const SolverConfig& cfg);

}  // namespace gspc
