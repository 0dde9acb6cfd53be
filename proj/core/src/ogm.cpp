#include "thermal_cbf/ogm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>

#include "thermal_cbf/error.hpp"

namespace thermal_cbf {

// ---------------------------------------------------------------------------
// GridMap

GridMap::GridMap(std::size_t height, std::size_t width, double cell_size, Vec2 origin)
    : GridMap(Raster<std::uint8_t>(height, width, 0), cell_size, origin) {}

GridMap::GridMap(Raster<std::uint8_t> cells, double cell_size, Vec2 origin)
    : cells_(std::move(cells)), cell_size_(cell_size), origin_(origin) {
  if (cells_.height() == 0 || cells_.width() == 0) {
    throw ContractViolation("grid map needs at least one row and one column");
  }
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) {
    throw ContractViolation("grid map cell size must be positive");
  }
}

std::size_t GridMap::occupied_count() const noexcept {
  const auto d = cells_.data();
  return static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [](auto v) { return v != 0; }));
}

Cell GridMap::cell_containing(Vec2 p) const noexcept {
  return {static_cast<std::ptrdiff_t>(std::floor((p.y - origin_.y) / cell_size_ + 0.5)),
          static_cast<std::ptrdiff_t>(std::floor((p.x - origin_.x) / cell_size_ + 0.5))};
}

std::size_t RegionLabels::count(Region r) const noexcept {
  const auto d = label.data();
  return static_cast<std::size_t>(std::count(d.begin(), d.end(), r));
}

// ---------------------------------------------------------------------------
// PGM

namespace {

class PgmCursor {
 public:
  explicit PgmCursor(std::string_view bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    const auto* first = bytes_.data() + pos_;
    const auto* last = bytes_.data() + bytes_.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) {
      throw ParseError(std::string("expected ") + what, start);
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  unsigned char byte() {
    if (at_end()) throw ParseError("truncated pixel payload", pos_);
    return static_cast<unsigned char>(bytes_[pos_++]);
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GridMap parse_pgm(std::string_view bytes, const PgmOptions& opts) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ParseError("unsupported magic number (expected P2 or P5)", 0);
  }
  const bool binary = bytes[1] == '5';
  PgmCursor cur(bytes);
  cur.byte();
  cur.byte();
  cur.skip_space_and_comments();
  const std::size_t width_at = cur.offset();
  const auto width = cur.read_uint("width");
  cur.skip_space_and_comments();
  const std::size_t height_at = cur.offset();
  const auto height = cur.read_uint("height");
  if (width == 0) throw ParseError("zero image width", width_at);
  if (height == 0) throw ParseError("zero image height", height_at);
  cur.skip_space_and_comments();
  const std::size_t maxval_at = cur.offset();
  const auto maxval = cur.read_uint("maxval");
  if (maxval == 0 || maxval > 65535) throw ParseError("maxval outside 1..65535", maxval_at);

  const double threshold = opts.occupied_threshold.value_or(static_cast<double>(maxval) / 2.0);
  Raster<std::uint8_t> cells(height, width, 0);

  if (binary) {
    // exactly one whitespace byte separates the header from the payload
    const std::size_t sep_at = cur.offset();
    if (!std::isspace(cur.byte())) throw ParseError("missing whitespace before payload", sep_at);
    const bool wide = maxval > 255;
    for (std::size_t i = 0; i < height; ++i) {
      for (std::size_t j = 0; j < width; ++j) {
        std::uint32_t v = cur.byte();
        if (wide) v = (v << 8) | cur.byte();
        if (v > maxval) throw ParseError("pixel exceeds maxval", cur.offset() - (wide ? 2 : 1));
        cells(i, j) = static_cast<double>(v) < threshold ? 1 : 0;
      }
    }
  } else {
    for (std::size_t i = 0; i < height; ++i) {
      for (std::size_t j = 0; j < width; ++j) {
        cur.skip_space_and_comments();
        if (cur.at_end()) throw ParseError("truncated pixel payload", cur.offset());
        const std::size_t at = cur.offset();
        const auto v = cur.read_uint("pixel value");
        if (v > maxval) throw ParseError("pixel exceeds maxval", at);
        cells(i, j) = static_cast<double>(v) < threshold ? 1 : 0;
      }
    }
  }
  return GridMap(std::move(cells), opts.cell_size, opts.origin);
}

GridMap load_pgm(const std::filesystem::path& path, const PgmOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pgm(bytes, opts);
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& out, const GridMap& map) {
  for (std::size_t i = 0; i < map.height(); ++i) {
    for (std::size_t j = 0; j < map.width(); ++j) {
      if (j) out << ',';
      out << (map.occupied(i, j) ? '1' : '0');
    }
    out << '\n';
  }
}

GridMap read_csv(std::istream& in, double cell_size, Vec2 origin) {
  std::vector<std::uint8_t> values;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t offset = 0;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    std::stringstream row(line);
    std::string tok;
    while (std::getline(row, tok, ',')) {
      if (tok != "0" && tok != "1") throw ParseError("expected 0 or 1 in map CSV", line_start);
      values.push_back(tok == "1" ? 1 : 0);
      ++count;
    }
    if (height == 0) width = count;
    if (count != width) throw ParseError("ragged map CSV row", line_start);
    ++height;
  }
  if (height == 0 || width == 0) throw ParseError("empty map CSV", offset);
  return GridMap(Raster<std::uint8_t>(height, width, std::move(values)), cell_size, origin);
}

// ---------------------------------------------------------------------------
// Distance transform

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared distance transform of a 1-D sampled function (lower envelope of
// parabolas). Entries equal to +inf are excluded from the envelope.
void edt_1d(std::span<const double> f, std::span<double> out, std::vector<std::size_t>& v,
            std::vector<double>& z) {
  const std::size_t n = f.size();
  v.clear();
  z.clear();
  for (std::size_t q = 0; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    const double fq = f[q] + static_cast<double>(q * q);
    while (!v.empty()) {
      const std::size_t p = v.back();
      const double fp = f[p] + static_cast<double>(p * p);
      const double s = (fq - fp) / (2.0 * static_cast<double>(q - p));
      if (s <= z.back()) {
        v.pop_back();
        z.pop_back();
      } else {
        v.push_back(q);
        z.push_back(s);
        break;
      }
    }
    if (v.empty()) {
      v.push_back(q);
      z.push_back(-kInf);
    }
  }
  if (v.empty()) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  std::size_t k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (k + 1 < v.size() && z[k + 1] < static_cast<double>(q)) ++k;
    const double d = static_cast<double>(q) - static_cast<double>(v[k]);
    out[q] = d * d + f[v[k]];
  }
}

// Squared distance in cell units to the nearest occupied cell center.
Raster<double> squared_cell_distance(const GridMap& map) {
  const std::size_t h = map.height();
  const std::size_t w = map.width();
  Raster<double> col_pass(h, w, kInf);

  // Vertical pass: nearest occupied cell within the same column.
  for (std::size_t j = 0; j < w; ++j) {
    double last = kInf;
    for (std::size_t i = 0; i < h; ++i) {
      if (map.occupied(i, j)) last = static_cast<double>(i);
      if (std::isfinite(last)) {
        const double d = static_cast<double>(i) - last;
        col_pass(i, j) = d * d;
      }
    }
    last = kInf;
    for (std::size_t i = h; i-- > 0;) {
      if (map.occupied(i, j)) last = static_cast<double>(i);
      if (std::isfinite(last)) {
        const double d = last - static_cast<double>(i);
        col_pass(i, j) = std::min(col_pass(i, j), d * d);
      }
    }
  }

  Raster<double> out(h, w, kInf);
  std::vector<std::size_t> v;
  std::vector<double> z;
  v.reserve(w);
  z.reserve(w);
  for (std::size_t i = 0; i < h; ++i) {
    edt_1d(col_pass.data().subspan(i * w, w), out.data().subspan(i * w, w), v, z);
  }
  return out;
}

}  // namespace

DistanceField distance_transform(const GridMap& map) {
  Raster<double> sq = squared_cell_distance(map);
  const double cs = map.cell_size();
  for (double& d : sq.data()) {
    d = std::isfinite(d) ? std::sqrt(d) * cs : DistanceField::kNoObstacle;
  }
  return DistanceField{std::move(sq)};
}

GridMap inflate(const GridMap& map, double radius_m) {
  if (!(radius_m >= 0.0)) throw ContractViolation("inflation radius must be non-negative");
  if (radius_m == 0.0) return map;
  const Raster<double> sq = squared_cell_distance(map);
  const double r_cells = radius_m / map.cell_size();
  // Integer squared offsets compared against (r/cs)^2; the slack absorbs the
  // rounding of the division so that e.g. r = 2 cs admits offset (2, 0).
  const double limit = r_cells * r_cells * (1.0 + 1e-12) + 1e-9;
  Raster<std::uint8_t> cells(map.height(), map.width(), 0);
  for (std::size_t k = 0; k < sq.size(); ++k) {
    cells.data()[k] = sq.data()[k] <= limit ? 1 : 0;
  }
  return GridMap(std::move(cells), map.cell_size(), map.origin());
}

RegionLabels classify_regions(const GridMap& map, const DistanceField& dist, double delta_m) {
  if (!(delta_m > 0.0)) throw ContractViolation("safety margin must be positive");
  if (dist.height() != map.height() || dist.width() != map.width()) {
    throw ContractViolation("distance field dimensions do not match the map");
  }
  // Distances equal to delta up to rounding count as Safe.
  const double safe_from = delta_m * (1.0 - 1e-12);
  RegionLabels out{Raster<Region>(map.height(), map.width(), Region::Safe)};
  for (std::size_t i = 0; i < map.height(); ++i) {
    for (std::size_t j = 0; j < map.width(); ++j) {
      if (map.occupied(i, j)) {
        out.label(i, j) = Region::Obstacle;
      } else if (!(dist.dist(i, j) >= safe_from)) {
        out.label(i, j) = Region::Transition;
      }
    }
  }
  return out;
}

Boundaries extract_boundaries(const RegionLabels& labels) {
  static constexpr std::ptrdiff_t kDr[4] = {-1, 0, 0, 1};
  static constexpr std::ptrdiff_t kDc[4] = {0, -1, 1, 0};
  Boundaries out;
  const auto& lab = labels.label;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lab.height()); ++i) {
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(lab.width()); ++j) {
      const Region r = lab(i, j);
      if (r == Region::Transition) continue;
      bool on_boundary = false;
      for (int k = 0; k < 4 && !on_boundary; ++k) {
        const Cell n{i + kDr[k], j + kDc[k]};
        if (r == Region::Obstacle) {
          on_boundary = !lab.contains(n) || lab[n] != Region::Obstacle;
        } else {
          on_boundary = lab.contains(n) && lab[n] == Region::Transition;
        }
      }
      if (on_boundary) (r == Region::Obstacle ? out.obstacle : out.safe).push_back({i, j});
    }
  }
  return out;
}

TransitionComponents transition_components(const RegionLabels& labels) {
  static constexpr std::ptrdiff_t kDr[4] = {-1, 0, 0, 1};
  static constexpr std::ptrdiff_t kDc[4] = {0, -1, 1, 0};
  const auto& lab = labels.label;
  TransitionComponents out;
  out.component = Raster<std::size_t>(lab.height(), lab.width(), TransitionComponents::kNone);
  std::vector<Cell> stack;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lab.height()); ++i) {
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(lab.width()); ++j) {
      if (lab(i, j) != Region::Transition || out.component(i, j) != TransitionComponents::kNone) {
        continue;
      }
      const std::size_t id = out.count();
      out.touches_obstacle.push_back(false);
      out.touches_safe.push_back(false);
      out.component(i, j) = id;
      stack.push_back({i, j});
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        for (int k = 0; k < 4; ++k) {
          const Cell n{c.row + kDr[k], c.col + kDc[k]};
          if (!lab.contains(n)) {
            out.touches_safe[id] = true;
            continue;
          }
          switch (lab[n]) {
            case Region::Obstacle:
              out.touches_obstacle[id] = true;
              break;
            case Region::Safe:
              out.touches_safe[id] = true;
              break;
            case Region::Transition:
              if (out.component[n] == TransitionComponents::kNone) {
                out.component[n] = id;
                stack.push_back(n);
              }
              break;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace thermal_cbf
