#pragma once

#include <Eigen/Core>
#include <functional>

#include "gspc/problem.hpp"

namespace gspc {

// Test oracles: slow, literal re-computations used to pin down the fast
// paths. Nothing here shares intermediate results with the code under test.

// Per-UE throughput [bit/s] recomputed position by position from the LSF map,
// estimation quality and association, without touching RateCoefficients.
double oracle_ue_rate(const Eigen::VectorXd& p, const LsfMap& lsf,
                      const ChannelQuality& quality, const Association& assoc,
                      const NetworkLayout& layout, int ue);

struct GridSearchResult {
  Eigen::VectorXd best;      // arg min, meaningful only when found
  double value = 0.0;
  bool found = false;        // at least one feasible grid point
  long long evaluated = 0;   // grid points visited
};

// Exhaustive minimization over the axis-aligned grid {0, step, 2*step, ...}
// bounded by hi per coordinate. Throws std::length_error when the grid has
// more than 2e7 points.
GridSearchResult grid_search(
    const Eigen::VectorXd& hi, double step,
    const std::function<bool(const Eigen::VectorXd&)>& feasible,
    const std::function<double(const Eigen::VectorXd&)>& objective);

// Grid minimum of the exact power model over power vectors meeting the
// demands and budgets; backhaul priced at the demand sum. hi is the per-BS
// budget at each position.
GridSearchResult grid_min_exact_power(const ProblemInstance& inst,
                                      double step);

}  // namespace gspc
