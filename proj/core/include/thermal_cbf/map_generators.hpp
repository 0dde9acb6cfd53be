#pragma once

#include <cstddef>

#include "thermal_cbf/ogm.hpp"
#include "thermal_cbf/random.hpp"

namespace thermal_cbf {

/// 6x6 map, 1 m cells, with a 2x2 occupied block at rows/cols 2..3. With a
/// margin of 1.2 m it yields the eight-unknown system whose matrix pairs
/// (0,1), (2,4), (3,5), (6,7) and whose rhs is 2b - a in every row.
GridMap four_block_map();
inline constexpr double kFourBlockDelta = 1.2;

struct BenchMapSpec {
  std::size_t size = 200;      // square map, cells
  double cell_size = 0.01;     // m
  std::size_t obstacles = 4;   // shapes per map
  double delta_m = 0.15;       // used to keep transition bands inside the window
};
/// Robot-centered local map of the kind seen while navigating: disks (about
/// two in three) and squares of roughly 350-480 cells each, placed so that
/// their transition bands stay inside the window and do not overlap.
GridMap random_bench_map(const BenchMapSpec& spec, Rng& rng);

/// Small random map for oracle sweeps: up to max_side cells per side, a few
/// random blobs, and a margin chosen so the map has Obstacle, Transition and
/// Safe cells with high probability.
struct OracleCase {
  GridMap map;
  double delta_m;
};
OracleCase random_oracle_case(Rng& rng, std::size_t max_side = 30);

}  // namespace thermal_cbf
