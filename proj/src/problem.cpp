#include "gspc/problem.hpp"

#include <stdexcept>

namespace gspc {

ProblemInstance build_problem(const NetworkLayout& layout,
                              const Association& assoc,
                              const RateCoefficients& coeffs,
                              const PowerModelParams& params) {
  const int K = layout.num_bs();
  const int L = layout.num_ue();
  const int F = layout.num_fc();
  if (params.epsilon <= 0.0) throw std::invalid_argument("epsilon must be > 0");

  ProblemInstance inst;
  inst.coeffs = coeffs;
  inst.assoc = assoc;
  inst.layout = layout;
  inst.power = params;
  inst.epsilon = params.epsilon;

  inst.demands.resize(L);
  for (int l = 0; l < L; ++l) {
    inst.demands[l] = layout.ues[l].rate_demand;
    if (inst.demands[l] < 0.0)
      throw std::invalid_argument("negative rate demand");
  }

  inst.budgets.resize(K);
  for (int k = 0; k < K; ++k) {
    inst.budgets[k] = layout.bss[k].p_max;
    if (inst.budgets[k] <= 0.0)
      throw std::invalid_argument("nonpositive power budget");
  }

  inst.sp_weights.resize(K, F);
  for (int k = 0; k < K; ++k)
    for (int f = 0; f < F; ++f)
      inst.sp_weights(k, f) = sp_weight(layout.bss[k], layout.fcs[f], params);
  if ((inst.sp_weights.array() < 0.0).any())
    throw std::invalid_argument("negative sparsity weight");

  inst.transmit_weight.resize(assoc.size);
  for (int pos = 0; pos < assoc.size; ++pos) {
    const auto& fc = layout.fcs[assoc.pos_fc[pos]];
    const auto& bs = layout.bss[assoc.pos_bs[pos]];
    if (fc.pilot_length >= fc.coherence_symbols)
      throw std::invalid_argument("pilot length must stay below beta_2");
    if (bs.pa_efficiency <= 0.0 || bs.pa_efficiency > 1.0)
      throw std::invalid_argument("PA efficiency outside (0,1]");
    inst.transmit_weight[pos] =
        (1.0 - fc.pilot_length / fc.coherence_symbols) / bs.pa_efficiency;
  }

  for (int l = 0; l < L; ++l) {
    if (inst.demands[l] <= 0.0) continue;
    if (assoc.servers[l].empty())
      inst.unservable_demand = true;
    else
      inst.constrained.push_back(l);
  }
  return inst;
}

}  // namespace gspc
