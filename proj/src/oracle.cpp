#include "gspc/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace gspc {

double oracle_ue_rate(const Eigen::VectorXd& p, const LsfMap& lsf,
                      const ChannelQuality& quality, const Association& assoc,
                      const NetworkLayout& layout, int ue) {
  double total = 0.0;
  for (int f = 0; f < layout.num_fc(); ++f) {
    const auto& fc = layout.fcs[f];
    double desired = 0.0, all = 0.0;
    for (int pos = 0; pos < assoc.size; ++pos) {
      if (assoc.pos_fc[pos] != f) continue;
      const int k = assoc.pos_bs[pos];
      const int j = assoc.pos_ue[pos];
      const double alpha = lsf.gain(k, ue, f);
      if (j == ue) {
        // own link: coherent beamforming gain, no self-interference
        const double delta = quality.at(k, ue, f);
        desired += alpha * (delta * (layout.bss[k].antennas - 1) + 1.0) *
                   p[pos];
      } else {
        desired += alpha * p[pos];
        all += alpha * p[pos];
      }
    }
    const double noise = fc.bandwidth * layout.noise_density;
    const double frac = 1.0 - fc.pilot_length / fc.coherence_symbols;
    total += frac * fc.bandwidth *
             (std::log2(noise + desired) - std::log2(noise + all));
  }
  return total;
}

GridSearchResult grid_search(
    const Eigen::VectorXd& hi, double step,
    const std::function<bool(const Eigen::VectorXd&)>& feasible,
    const std::function<double(const Eigen::VectorXd&)>& objective) {
  const int n = static_cast<int>(hi.size());
  std::vector<long long> points(n);
  long long total = 1;
  for (int i = 0; i < n; ++i) {
    points[i] = static_cast<long long>(std::floor(hi[i] / step)) + 1;
    if (points[i] < 1) points[i] = 1;
    total *= points[i];
    if (total > 20'000'000)
      throw std::length_error("grid search past 2e7 points");
  }

  GridSearchResult out;
  std::vector<long long> idx(n, 0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (long long visit = 0; visit < total; ++visit) {
    for (int i = 0; i < n; ++i) x[i] = static_cast<double>(idx[i]) * step;
    ++out.evaluated;
    if (feasible(x)) {
      const double v = objective(x);
      if (!out.found || v < out.value) {
        out.found = true;
        out.value = v;
        out.best = x;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (++idx[i] < points[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

GridSearchResult grid_min_exact_power(const ProblemInstance& inst,
                                      double step) {
  const int n = inst.num_positions();
  Eigen::VectorXd hi(n);
  for (int pos = 0; pos < n; ++pos)
    hi[pos] = inst.budgets[inst.assoc.pos_bs[pos]];

  const auto feasible = [&](const Eigen::VectorXd& x) {
    for (int k = 0; k < inst.num_bs(); ++k) {
      double load = 0.0;
      for (int pos = 0; pos < n; ++pos)
        if (inst.assoc.pos_bs[pos] == k) load += x[pos];
      if (load > inst.budgets[k]) return false;
    }
    for (int ue : inst.constrained)
      if (ue_rate(x, inst.coeffs, inst.layout, ue) < inst.demands[ue])
        return false;
    return true;
  };
  const auto objective = [&](const Eigen::VectorXd& x) {
    return total_power_exact(x, inst.layout, inst.assoc, inst.power,
                             inst.demands.sum());
  };
  return grid_search(hi, step, feasible, objective);
}

}  // namespace gspc
