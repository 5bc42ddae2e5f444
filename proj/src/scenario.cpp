#include "gspc/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "gspc/rng.hpp"

namespace gspc {

bool inside_hexagon(const Eigen::Vector2d& p, const Eigen::Vector2d& center,
                    double r) {
  // Intersection of three slabs with edge normals at 30/90/150 degrees and
  // half-width equal to the apothem.
  const double apothem = 0.5 * std::sqrt(3.0) * r;
  const Eigen::Vector2d d = p - center;
  for (int m = 0; m < 3; ++m) {
    const double ang = M_PI / 6.0 + m * M_PI / 3.0;
    const double proj = d.x() * std::cos(ang) + d.y() * std::sin(ang);
    if (std::abs(proj) > apothem + 1e-12) return false;
  }
  return true;
}

std::vector<Eigen::Vector2d> hex_cell_centers(int count, double r) {
  const double s = std::sqrt(3.0) * r;  // center spacing
  // Lattice basis along two adjacency directions (30 and 90 degrees).
  const Eigen::Vector2d u(s * std::cos(M_PI / 6.0), s * std::sin(M_PI / 6.0));
  const Eigen::Vector2d v(0.0, s);
  std::vector<Eigen::Vector2d> centers;
  centers.reserve(count);
  if (count > 0) centers.emplace_back(0.0, 0.0);
  // Ring spiral: ring 1 holds the 6 neighbors, ring 2 the next 12, ...
  for (int ring = 1; static_cast<int>(centers.size()) < count; ++ring) {
    Eigen::Vector2d c = ring * u;  // start on the 30-degree axis
    const Eigen::Vector2d steps[6] = {v - u, -u, -v, u - v, u, v};
    for (const auto& step : steps) {
      for (int i = 0; i < ring; ++i) {
        if (static_cast<int>(centers.size()) >= count) return centers;
        centers.push_back(c);
        c += step;
      }
    }
  }
  return centers;
}

double path_loss(const BaseStation& bs, const UserEquipment& ue,
                 const FrequencyCarrier& fc, double shadow_db,
                 const ScenarioConfig& cfg) {
  const bool is_macro = bs.cls == BsClass::macro;
  const double d_min = is_macro ? cfg.macro_min_dist : cfg.pico_min_dist;
  const double d_km =
      std::max((bs.position - ue.position).norm(), d_min) / 1000.0;
  const double f_ghz = fc.center_frequency / 1e9;
  const double pl_db =
      is_macro ? 128.1 + 37.6 * std::log10(d_km) + 20.0 * std::log10(f_ghz / 2.0)
               : 140.7 + 36.7 * std::log10(d_km) + 20.0 * std::log10(f_ghz / 2.0);
  return std::pow(10.0, -(pl_db + shadow_db) / 10.0);
}

namespace {

Eigen::Vector2d sample_in_hexagon(Rng& rng, const Eigen::Vector2d& center,
                                  double r) {
  const double apothem = 0.5 * std::sqrt(3.0) * r;
  for (;;) {
    Eigen::Vector2d p(center.x() + rng.uniform(-r, r),
                      center.y() + rng.uniform(-apothem, apothem));
    if (inside_hexagon(p, center, r)) return p;
  }
}

}  // namespace

NetworkLayout generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  if (cfg.macro_cells < 1) throw std::invalid_argument("macro_cells < 1");
  if (cfg.cell_radius <= 0.0) throw std::invalid_argument("cell_radius <= 0");
  if (cfg.picos_per_cell < 0 || cfg.ues_per_cell < 0)
    throw std::invalid_argument("negative per-cell count");
  if (cfg.fc_count < 1 || cfg.bands.empty() ||
      cfg.fc_count % static_cast<int>(cfg.bands.size()) != 0)
    throw std::invalid_argument("fc_count must be a positive multiple of the band count");
  if (cfg.macro_antennas < 1 || cfg.pico_antennas < 1)
    throw std::invalid_argument("antenna counts must be >= 1");

  NetworkLayout out;
  out.noise_density = cfg.noise_density;
  out.macro_radius = cfg.cell_radius;
  out.rng_seed = seed;
  out.config = cfg;

  const auto centers = hex_cell_centers(cfg.macro_cells, cfg.cell_radius);

  for (int c = 0; c < cfg.macro_cells; ++c) {
    BaseStation bs;
    bs.id = c;
    bs.cls = BsClass::macro;
    bs.position = centers[c];
    bs.antennas = cfg.macro_antennas;
    bs.p_max = cfg.macro_p_max;
    bs.p_sleep0 = cfg.macro_p_sleep0;
    bs.pa_efficiency = cfg.macro_pa_efficiency;
    out.bss.push_back(bs);
  }
  for (int c = 0; c < cfg.macro_cells; ++c) {
    Rng rng(derive_seed(seed, 1, c));
    for (int i = 0; i < cfg.picos_per_cell; ++i) {
      BaseStation bs;
      bs.id = static_cast<int>(out.bss.size());
      bs.cls = BsClass::pico;
      bs.position = sample_in_hexagon(rng, centers[c], cfg.cell_radius);
      bs.antennas = cfg.pico_antennas;
      bs.p_max = cfg.pico_p_max;
      bs.p_sleep0 = cfg.pico_p_sleep0;
      bs.pa_efficiency = cfg.pico_pa_efficiency;
      out.bss.push_back(bs);
    }
  }

  for (int c = 0; c < cfg.macro_cells; ++c) {
    Rng rng(derive_seed(seed, 2, c));
    for (int i = 0; i < cfg.ues_per_cell; ++i) {
      UserEquipment ue;
      ue.id = static_cast<int>(out.ues.size());
      ue.cell = c;
      ue.rate_demand = cfg.rate_demand;
      ue.uplink_train_power = cfg.uplink_train_power;
      bool placed = false;
      for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
        const Eigen::Vector2d p =
            sample_in_hexagon(rng, centers[c], cfg.cell_radius);
        placed = true;
        for (const auto& bs : out.bss) {
          const double d_min = bs.cls == BsClass::macro ? cfg.macro_min_dist
                                                        : cfg.pico_min_dist;
          if ((bs.position - p).norm() < d_min) {
            placed = false;
            break;
          }
        }
        if (placed) ue.position = p;
      }
      if (!placed)
        throw std::runtime_error("UE placement failed: minimum-distance rules too tight");
      out.ues.push_back(ue);
    }
  }

  const int per_band = cfg.fc_count / static_cast<int>(cfg.bands.size());
  const int total_ue = cfg.macro_cells * cfg.ues_per_cell;
  // Placeholder pilot length; the default pilot plan recomputes it from the
  // association and re-syncs the layout.
  const double tau = std::min(std::max(cfg.pilot_min, static_cast<double>(total_ue)),
                              cfg.coherence_symbols - 1.0);
  for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
    const double width = (cfg.bands[b].hi_hz - cfg.bands[b].lo_hz) / per_band;
    if (width <= 0.0) throw std::invalid_argument("band with nonpositive width");
    for (int i = 0; i < per_band; ++i) {
      FrequencyCarrier fc;
      fc.id = static_cast<int>(out.fcs.size());
      fc.bandwidth = width;
      fc.center_frequency = cfg.bands[b].lo_hz + (i + 0.5) * width;
      fc.pilot_length = tau;
      fc.coherence_symbols = cfg.coherence_symbols;
      fc.lsf_symbols = cfg.lsf_factor * cfg.coherence_symbols;
      out.fcs.push_back(fc);
    }
  }
  return out;
}

LsfMap build_lsf_map(const NetworkLayout& layout) {
  const int K = layout.num_bs();
  const int L = layout.num_ue();
  const int F = layout.num_fc();
  LsfMap map;
  map.gains.assign(F, Eigen::MatrixXd(K, L));
  Rng rng(derive_seed(layout.rng_seed, 3));
  for (int k = 0; k < K; ++k) {
    const auto& bs = layout.bss[k];
    const double sigma = bs.cls == BsClass::macro
                             ? layout.config.macro_shadow_sigma_db
                             : layout.config.pico_shadow_sigma_db;
    for (int l = 0; l < L; ++l) {
      const double shadow_db = sigma * rng.normal();  // shared across FCs
      for (int f = 0; f < F; ++f)
        map.gains[f](k, l) =
            path_loss(bs, layout.ues[l], layout.fcs[f], shadow_db, layout.config);
    }
  }
  return map;
}

}  // namespace gspc
