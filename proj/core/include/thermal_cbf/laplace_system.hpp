#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "thermal_cbf/ogm.hpp"

namespace thermal_cbf {

/// Dirichlet temperatures: obstacles are held at -a, safe cells and the map
/// border at +b_val.
struct BoundaryValues {
  double a = 1.0;
  double b_val = 1.0;
};

/// Row-major numbering of the Transition cells, the unknowns of the system.
class UnknownIndex {
 public:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  UnknownIndex() = default;
  explicit UnknownIndex(const RegionLabels& labels);

  std::size_t count() const noexcept { return cells_.size(); }
  Cell cell_of(std::size_t unknown) const { return cells_.at(unknown); }
  std::optional<std::size_t> index_of(Cell c) const;
  /// kNone for cells that are not unknowns.
  std::size_t raw_index(std::size_t row, std::size_t col) const { return index_(row, col); }

  std::span<const Cell> cells() const noexcept { return cells_; }
  std::size_t height() const noexcept { return index_.height(); }
  std::size_t width() const noexcept { return index_.width(); }

 private:
  std::vector<Cell> cells_;
  Raster<std::size_t> index_;
};

/// Compressed-sparse-row storage of a square matrix.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<double> values;

  std::size_t nonzeros() const noexcept { return values.size(); }
  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;
};

/// A h = rhs for the Transition unknowns.
struct LinearSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;

  std::size_t size() const noexcept { return matrix.n; }
};

UnknownIndex index_unknowns(const RegionLabels& labels);

/// Five-point stencil: row i reads 4 h_i - sum(Transition neighbors) = rhs_i,
/// with Obstacle neighbors contributing -a and Safe or off-map neighbors +b_val.
LinearSystem assemble(const RegionLabels& labels, const UnknownIndex& index,
                      const BoundaryValues& bv);

class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultOracleCap = 2000;

/// Dense Gaussian elimination with partial pivoting. Test oracle only.
std::vector<double> dense_oracle_solve(const LinearSystem& sys,
                                       std::size_t max_n = kDefaultOracleCap);

/// Writes the lower triangle as "%%MatrixMarket matrix coordinate real symmetric".
void write_matrix_market(std::ostream& out, const CsrMatrix& m);
/// One value per line.
void write_vector(std::ostream& out, std::span<const double> v);

}  // namespace thermal_cbf
