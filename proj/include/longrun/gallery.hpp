#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "longrun/model.hpp"

namespace longrun {

struct GalleryCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string note;
};

struct GalleryReport {
  std::string instance;
  std::vector<GalleryCheck> checks;
  bool ok() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

/// Square: pick a vertical speed once, then drift right across a reward
/// strip. Finite-horizon values stay near 1/2 while every play's running
/// average collapses; the transition map is smooth but not non-expansive.
struct SquareInstance {
  Model model;
  std::vector<double> speeds;       // positive grid speeds
  std::vector<StateId> entries;     // state (0, speed) per speed
};
SquareInstance square_model(int grid_y);
GalleryReport square_diagnostics(int grid_y);

/// Simplex: mass drains from the neutral point toward a reward of
/// (1-alpha)/(1+alpha); smaller committed alpha pays more in the limit,
/// so refining the alpha grid drives the long-run value toward 1.
struct SimplexInstance {
  Model model;
  std::vector<double> alphas;       // the grid, zeros included
  std::vector<StateId> entries;     // first trajectory state per positive alpha
  std::vector<StateId> absorbers;   // absorbing tail state per positive alpha
  double mass_threshold = 0.0;
};
SimplexInstance simplex_model(const std::vector<double>& alpha_grid,
                              double mass_threshold = 1e-4);
GalleryReport simplex_diagnostics(const std::vector<double>& alpha_grid,
                                  double mass_threshold = 1e-4);

/// Blocks: an uncontrolled 1^k 0^k pattern. Cesaro averages settle at 1/2
/// but the start-of-block shifted values stay at 1 for horizons up to the
/// block count, keeping the inf-sup at 1.
struct BlocksInstance {
  Model model;
  int block_count = 0;
  std::vector<StateId> block_starts;  // state opening each block
};
BlocksInstance blocks_model(int k_blocks);
GalleryReport blocks_diagnostics(int k_blocks);

/// Abel gap: a 0/1 stream with super-geometric runs makes Cesaro peaks
/// that Abel means never reach; staying at the hub secures the Abel
/// limit, so discounted values converge while no play secures the Cesaro
/// limsup.
struct AbelGapInstance {
  Model model;
  std::vector<double> stream;
  double hub_reward = 0.0;     // reward of the stay-forever state
  double cesaro_max = 0.0;
  double abel_grid_max = 0.0;  // bracket upper end, maximized over the grid
  double margin = 0.0;         // cesaro_max - abel_grid_max
};
AbelGapInstance abelgap_model(std::int64_t horizon = 1'000'000, int base = 4);
GalleryReport abelgap_diagnostics(std::int64_t horizon = 1'000'000,
                                  int base = 4);

/// Interval: two segments where every continuous one-shot selection must
/// pass through the worthless midpoint, while plays themselves can always
/// secure 1/2. Non-expansive, value |z - 5/2| on the absorbing segment.
struct IntervalInstance {
  Model model;
  std::vector<double> coords;
  std::vector<StateId> left_states;   // grid of [-1, 1]
  std::vector<StateId> right_states;  // grid of [2, 3]
};
IntervalInstance interval_model(int grid_per_unit);
GalleryReport interval_diagnostics(int grid_per_unit);

}  // namespace longrun
