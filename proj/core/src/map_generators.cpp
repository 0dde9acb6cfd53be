#include "thermal_cbf/map_generators.hpp"

#include <cmath>
#include <vector>

namespace thermal_cbf {

GridMap four_block_map() {
  GridMap map(6, 6, 1.0, {0.0, 0.0});
  for (std::size_t i = 2; i <= 3; ++i) {
    for (std::size_t j = 2; j <= 3; ++j) map.set_occupied(i, j);
  }
  return map;
}

GridMap random_bench_map(const BenchMapSpec& spec, Rng& rng) {
  const double cs = spec.cell_size;
  const double extent = static_cast<double>(spec.size) * cs;
  GridMap map(spec.size, spec.size, cs, {0.0, 0.0});

  struct Placed {
    double cx, cy, reach;
  };
  std::vector<Placed> placed;
  for (std::size_t k = 0; k < spec.obstacles; ++k) {
    const bool disk = rng.bernoulli(0.65);
    // disk radius 10.5-12 cells, square side 19-22 cells: ~350-480 cells
    const double radius = rng.uniform(10.5, 12.0) * cs;
    const double half = rng.uniform(9.5, 11.0) * cs;
    const double reach = (disk ? radius : half * std::sqrt(2.0)) + spec.delta_m;
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double cx = rng.uniform(reach, extent - reach);
      const double cy = rng.uniform(reach, extent - reach);
      bool clear = true;
      for (const auto& p : placed) {
        if (std::hypot(p.cx - cx, p.cy - cy) < p.reach + reach) clear = false;
      }
      if (!clear) continue;
      placed.push_back({cx, cy, reach});
      for (std::size_t i = 0; i < spec.size; ++i) {
        for (std::size_t j = 0; j < spec.size; ++j) {
          const Vec2 c = map.cell_center({static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j)});
          const bool inside = disk ? std::hypot(c.x - cx, c.y - cy) <= radius
                                   : std::abs(c.x - cx) <= half && std::abs(c.y - cy) <= half;
          if (inside) map.set_occupied(i, j);
        }
      }
      break;
    }
  }
  return map;
}

OracleCase random_oracle_case(Rng& rng, std::size_t max_side) {
  const auto h = static_cast<std::size_t>(rng.uniform_int(3, static_cast<std::int64_t>(max_side)));
  const auto w = static_cast<std::size_t>(rng.uniform_int(3, static_cast<std::int64_t>(max_side)));
  GridMap map(h, w, 1.0, {0.0, 0.0});
  const auto blobs = rng.uniform_int(1, 4);
  for (std::int64_t b = 0; b < blobs; ++b) {
    const auto ci = rng.uniform_int(0, static_cast<std::int64_t>(h) - 1);
    const auto cj = rng.uniform_int(0, static_cast<std::int64_t>(w) - 1);
    const double r = rng.uniform(0.0, 2.5);
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        if (std::hypot(static_cast<double>(i) - static_cast<double>(ci),
                       static_cast<double>(j) - static_cast<double>(cj)) <= r) {
          map.set_occupied(i, j);
        }
      }
    }
  }
  const double delta = rng.uniform(1.1, 5.0);
  return {std::move(map), delta};
}

}  // namespace thermal_cbf
