#pragma once

#include <string>
#include <vector>

#include "gspc/scenario.hpp"

namespace gspc {

// BS-UE association and the flattened power-vector layout it induces.
//
// Positions are ordered BS-major, FC-major, UE-minor: for each BS k, for each
// FC f, the served UEs of k in ascending UE index. A (k, f) run is therefore
// contiguous, which is what the per-(BS, FC) group structure needs.
struct Association {
  std::vector<std::vector<int>> served;   // U_k, ascending UE index
  std::vector<std::vector<int>> servers;  // B_l, ascending BS index
  std::vector<int> dropped_ues;           // UEs with empty B_l
  int num_fc = 0;
  int size = 0;  // F * sum_k |U_k|

  // Per-position inverse maps.
  std::vector<int> pos_bs, pos_ue, pos_fc;

  // position(k, f, i) for the i-th served UE of BS k.
  int position(int k, int f, int slot) const {
    return run_start[k] + f * static_cast<int>(served[k].size()) + slot;
  }
  // Position of (k, ue, f), or -1 when BS k does not serve `ue`.
  int find_position(int k, int ue, int f) const;
  // First position of the (k, f) group; the run has |U_k| entries.
  int group_start(int k, int f) const {
    return run_start[k] + f * static_cast<int>(served[k].size());
  }
  int group_size(int k) const { return static_cast<int>(served[k].size()); }

  std::vector<int> run_start;  // first position of BS k's block
};

// Each BS selects its min(N_k, L) best UEs by mean dB gain across FCs (ties:
// lower UE index); B_l by inversion; UEs nobody selected are dropped.
Association initial_association(const LsfMap& lsf, const NetworkLayout& layout);

// Exact count bound on distinct association patterns:
// sum_k sum_{n=1}^{min(F*N_k, L)} C(L, n), as a decimal string (the value
// overflows any fixed-width integer for realistic L).
std::string association_count_bound(const NetworkLayout& layout);
std::string association_count_bound(const std::vector<int>& antennas, int F,
                                    int L);

}  // namespace gspc
