#include "gspc/power_model.hpp"

#include <cmath>
#include <stdexcept>

namespace gspc {

double sp_weight(const BaseStation& bs, const FrequencyCarrier& fc,
                 const PowerModelParams& params) {
  return bs.antennas * (fc.bandwidth / 10e6) * params.sp_ref(bs.cls);
}

std::vector<std::vector<int>> group_positions(const Association& assoc,
                                              Grouping grouping) {
  const int K = static_cast<int>(assoc.served.size());
  const int F = assoc.num_fc;
  std::vector<std::vector<int>> groups;
  switch (grouping) {
    case Grouping::per_bs:
      for (int k = 0; k < K; ++k) {
        std::vector<int> g;
        for (int f = 0; f < F; ++f)
          for (int i = 0; i < assoc.group_size(k); ++i)
            g.push_back(assoc.position(k, f, i));
        groups.push_back(std::move(g));
      }
      break;
    case Grouping::per_bs_fc:
      for (int k = 0; k < K; ++k)
        for (int f = 0; f < F; ++f) {
          std::vector<int> g;
          for (int i = 0; i < assoc.group_size(k); ++i)
            g.push_back(assoc.position(k, f, i));
          groups.push_back(std::move(g));
        }
      break;
    case Grouping::per_ue:
    case Grouping::per_ue_fc: {
      const int L = static_cast<int>(assoc.servers.size());
      for (int l = 0; l < L; ++l) {
        if (assoc.servers[l].empty()) continue;
        if (grouping == Grouping::per_ue) {
          std::vector<int> g;
          for (int k : assoc.servers[l])
            for (int f = 0; f < F; ++f) g.push_back(assoc.find_position(k, l, f));
          groups.push_back(std::move(g));
        } else {
          for (int f = 0; f < F; ++f) {
            std::vector<int> g;
            for (int k : assoc.servers[l]) g.push_back(assoc.find_position(k, l, f));
            groups.push_back(std::move(g));
          }
        }
      }
      break;
    }
    case Grouping::per_fc:
      for (int f = 0; f < F; ++f) {
        std::vector<int> g;
        for (int pos = 0; pos < assoc.size; ++pos)
          if (assoc.pos_fc[pos] == f) g.push_back(pos);
        groups.push_back(std::move(g));
      }
      break;
  }
  return groups;
}

double group_sparsity(const Eigen::VectorXd& x, const Association& assoc,
                      Grouping grouping, const Eigen::VectorXd& weights) {
  const auto groups = group_positions(assoc, grouping);
  if (static_cast<int>(groups.size()) != weights.size())
    throw std::invalid_argument("group_sparsity: weight count != group count");
  double total = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    bool active = false;
    for (int pos : groups[g])
      if (x[pos] != 0.0) {
        active = true;
        break;
      }
    if (active) total += weights[static_cast<int>(g)];
  }
  return total;
}

double transmit_power_total(const Eigen::VectorXd& p,
                            const NetworkLayout& layout,
                            const Association& assoc) {
  double total = 0.0;
  for (int pos = 0; pos < assoc.size; ++pos) {
    const auto& fc = layout.fcs[assoc.pos_fc[pos]];
    const double fraction = 1.0 - fc.pilot_length / fc.coherence_symbols;
    total += fraction * p[pos] / layout.bss[assoc.pos_bs[pos]].pa_efficiency;
  }
  return total;
}

namespace {

// Shared skeleton: sleep + sparsity(term per active group) + PA + backhaul.
template <class GroupTerm>
double total_power_impl(const Eigen::VectorXd& p, const NetworkLayout& layout,
                        const Association& assoc,
                        const PowerModelParams& params, double backhaul_bps,
                        GroupTerm&& term) {
  double total = 0.0;
  for (const auto& bs : layout.bss) total += bs.p_sleep0;
  for (int k = 0; k < layout.num_bs(); ++k)
    for (int f = 0; f < layout.num_fc(); ++f) {
      const double w = sp_weight(layout.bss[k], layout.fcs[f], params);
      const int start = assoc.group_start(k, f);
      const int size = assoc.group_size(k);
      if (size > 0) total += term(w, p.segment(start, size));
    }
  total += transmit_power_total(p, layout, assoc);
  total += params.haul_ref * backhaul_bps / 100e6;
  return total;
}

}  // namespace

double total_power_exact(const Eigen::VectorXd& p, const NetworkLayout& layout,
                         const Association& assoc,
                         const PowerModelParams& params, double backhaul_bps) {
  return total_power_impl(p, layout, assoc, params, backhaul_bps,
                          [](double w, const auto& x) {
                            return (x.array() != 0.0).any() ? w : 0.0;
                          });
}

double total_power_smooth(const Eigen::VectorXd& p, const NetworkLayout& layout,
                          const Association& assoc,
                          const PowerModelParams& params, double backhaul_bps,
                          double eps) {
  if (eps <= 0.0) throw std::invalid_argument("total_power_smooth: eps <= 0");
  const double denom = std::log1p(1.0 / eps);
  return total_power_impl(p, layout, assoc, params, backhaul_bps,
                          [&](double w, const auto& x) {
                            return w * std::log1p(x.sum() / eps) / denom;
                          });
}

double total_power_l21(const Eigen::VectorXd& p, const NetworkLayout& layout,
                       const Association& assoc,
                       const PowerModelParams& params, double backhaul_bps) {
  return total_power_impl(p, layout, assoc, params, backhaul_bps,
                          [](double w, const auto& x) {
                            return w * x.matrix().norm();
                          });
}

}  // namespace gspc
