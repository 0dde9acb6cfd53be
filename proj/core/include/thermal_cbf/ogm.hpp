#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "thermal_cbf/geometry.hpp"
#include "thermal_cbf/raster.hpp"

namespace thermal_cbf {

/// Binary occupancy grid. Cell (i, j) has its center at
/// origin + (j * cell_size, i * cell_size); rows grow along +y.
class GridMap {
 public:
  GridMap(std::size_t height, std::size_t width, double cell_size, Vec2 origin = {});
  GridMap(Raster<std::uint8_t> cells, double cell_size, Vec2 origin = {});

  std::size_t height() const noexcept { return cells_.height(); }
  std::size_t width() const noexcept { return cells_.width(); }
  double cell_size() const noexcept { return cell_size_; }
  Vec2 origin() const noexcept { return origin_; }

  bool contains(Cell c) const noexcept { return cells_.contains(c); }
  bool occupied(std::size_t row, std::size_t col) const { return cells_(row, col) != 0; }
  bool occupied(Cell c) const { return cells_[c] != 0; }
  void set_occupied(std::size_t row, std::size_t col, bool value = true) {
    cells_(row, col) = value ? 1 : 0;
  }

  std::size_t occupied_count() const noexcept;

  Vec2 cell_center(Cell c) const noexcept {
    return {origin_.x + static_cast<double>(c.col) * cell_size_,
            origin_.y + static_cast<double>(c.row) * cell_size_};
  }
  /// Cell whose square footprint contains p (may lie outside the map).
  Cell cell_containing(Vec2 p) const noexcept;

  const Raster<std::uint8_t>& cells() const noexcept { return cells_; }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  Raster<std::uint8_t> cells_;
  double cell_size_;
  Vec2 origin_;
};

/// Meters to the nearest occupied cell center; +infinity when the map has none.
struct DistanceField {
  static constexpr double kNoObstacle = std::numeric_limits<double>::infinity();

  Raster<double> dist;

  std::size_t height() const noexcept { return dist.height(); }
  std::size_t width() const noexcept { return dist.width(); }
};

enum class Region : std::uint8_t { Obstacle, Transition, Safe };

struct RegionLabels {
  Raster<Region> label;

  std::size_t height() const noexcept { return label.height(); }
  std::size_t width() const noexcept { return label.width(); }
  std::size_t count(Region r) const noexcept;
};

struct PgmOptions {
  double cell_size = 0.01;
  Vec2 origin{};
  /// Pixels strictly darker than this are occupied. Defaults to maxval / 2.
  std::optional<double> occupied_threshold;
};

/// Reads a binary (P5) or ASCII (P2) graymap. Throws ParseError.
GridMap load_pgm(const std::filesystem::path& path, const PgmOptions& opts = {});
GridMap parse_pgm(std::string_view bytes, const PgmOptions& opts = {});

/// Debug dump: H lines of W comma-separated 0/1 values, row 0 first.
void write_csv(std::ostream& out, const GridMap& map);
GridMap read_csv(std::istream& in, double cell_size, Vec2 origin = {});

/// Disk dilation: a cell becomes occupied when an occupied cell center lies
/// within radius_m of its own center.
GridMap inflate(const GridMap& map, double radius_m);

/// Exact Euclidean distance transform (two-pass lower-envelope method).
DistanceField distance_transform(const GridMap& map);

/// Obstacle = occupied, Safe = free with dist >= delta_m, Transition otherwise.
RegionLabels classify_regions(const GridMap& map, const DistanceField& dist, double delta_m);

struct Boundaries {
  std::vector<Cell> obstacle;  // Obstacle cells with a non-Obstacle 4-neighbor (or map edge)
  std::vector<Cell> safe;      // Safe cells with a Transition 4-neighbor
};

Boundaries extract_boundaries(const RegionLabels& labels);

/// 4-connected components of the Transition region and which Dirichlet
/// values each one touches (off-map neighbors count as safe).
struct TransitionComponents {
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  Raster<std::size_t> component;  // kNone outside Transition
  std::vector<bool> touches_obstacle;
  std::vector<bool> touches_safe;

  std::size_t count() const noexcept { return touches_obstacle.size(); }
  bool borders_both(std::size_t c) const { return touches_obstacle[c] && touches_safe[c]; }
};

TransitionComponents transition_components(const RegionLabels& labels);

}  // namespace thermal_cbf
