#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace gspc {

// -174 dBm/Hz thermal noise density in W/Hz (10^(-20.4)).
inline constexpr double kDefaultNoiseDensity = 3.9810717055349725e-21;

enum class BsClass { macro, pico };

struct BaseStation {
  int id = 0;
  BsClass cls = BsClass::macro;
  Eigen::Vector2d position{0.0, 0.0};  // [m]
  int antennas = 1;                    // N_k
  double p_max = 40.0;                 // transmit budget [W]
  double p_sleep0 = 75.0;              // deep-sleep floor [W]
  double pa_efficiency = 0.35;         // eta_k, in (0,1)
};

struct UserEquipment {
  int id = 0;
  Eigen::Vector2d position{0.0, 0.0};  // [m]
  double rate_demand = 0.0;            // gamma_l [bit/s]
  double uplink_train_power = 0.2;     // p_UE [W]
  int cell = 0;                        // owning macro cell
};

struct FrequencyCarrier {
  int id = 0;
  double center_frequency = 793e6;   // [Hz]
  double bandwidth = 20e6;           // W_f [Hz]
  double pilot_length = 8.0;         // tau_f [symbols], < coherence_symbols
  double coherence_symbols = 200.0;  // beta_2f [symbols]
  double lsf_symbols = 4000.0;       // beta_1f [symbols], >= beta_2f
};

struct Band {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

struct ScenarioConfig {
  int macro_cells = 3;
  double cell_radius = 250.0;  // hexagon circumradius [m]
  int picos_per_cell = 5;
  int ues_per_cell = 5;
  int macro_antennas = 64;
  int pico_antennas = 4;
  double macro_p_max = 40.0;  // [W]
  double pico_p_max = 1.0;
  double macro_p_sleep0 = 75.0;  // [W]
  double pico_p_sleep0 = 4.3;
  double macro_pa_efficiency = 0.35;
  double pico_pa_efficiency = 0.25;
  double macro_min_dist = 35.0;  // BS-UE distance floor [m]
  double pico_min_dist = 10.0;
  double macro_shadow_sigma_db = 8.0;
  double pico_shadow_sigma_db = 10.0;
  double rate_demand = 2e6;         // gamma per UE [bit/s]
  double uplink_train_power = 0.2;  // [W]
  double noise_density = kDefaultNoiseDensity;
  // Total FC count; split evenly across the bands (fc_count % bands == 0).
  int fc_count = 2;
  std::vector<Band> bands{{783e6, 803e6}, {1900e6, 1920e6}};
  double coherence_symbols = 200.0;  // beta_2
  double lsf_factor = 20.0;          // beta_1 = lsf_factor * beta_2
  double pilot_min = 8.0;            // floor for tau_f
};

struct NetworkLayout {
  std::vector<BaseStation> bss;
  std::vector<UserEquipment> ues;
  std::vector<FrequencyCarrier> fcs;
  double noise_density = kDefaultNoiseDensity;  // sigma^2 [W/Hz]
  double macro_radius = 250.0;                  // hexagon circumradius [m]
  std::uint64_t rng_seed = 0;
  ScenarioConfig config;  // generation parameters, kept for downstream models

  int num_bs() const { return static_cast<int>(bss.size()); }
  int num_ue() const { return static_cast<int>(ues.size()); }
  int num_fc() const { return static_cast<int>(fcs.size()); }
};

// Large-scale-fading gains alpha_{k,l}^f, strictly positive and finite.
struct LsfMap {
  std::vector<Eigen::MatrixXd> gains;  // gains[f](k, l)

  double gain(int k, int l, int f) const { return gains[f](k, l); }
  int num_fc() const { return static_cast<int>(gains.size()); }
};

// Hexagon membership for a point relative to the hexagon center; vertices at
// angles 0, 60, ..., 300 degrees (circumradius r).
bool inside_hexagon(const Eigen::Vector2d& p, const Eigen::Vector2d& center,
                    double r);

// Centers of `count` mutually packed hexagonal cells (ring spiral from the
// origin), spacing sqrt(3) * r between adjacent centers.
std::vector<Eigen::Vector2d> hex_cell_centers(int count, double r);

// Path-loss gain for one link with an explicit shadowing draw [dB]. Distance
// is clamped to the class minimum before evaluation.
double path_loss(const BaseStation& bs, const UserEquipment& ue,
                 const FrequencyCarrier& fc, double shadow_db,
                 const ScenarioConfig& cfg);

// Random layout: macro BSs on hexagon centers, picos/UEs uniform in their
// cell honoring minimum BS-UE distances. Deterministic in (config, seed).
NetworkLayout generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

// Gains for every (BS, UE, FC); one shadowing draw per (BS, UE) pair shared
// across FCs. Deterministic in layout.rng_seed.
LsfMap build_lsf_map(const NetworkLayout& layout);

}  // namespace gspc
