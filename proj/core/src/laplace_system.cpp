#include "thermal_cbf/laplace_system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "thermal_cbf/error.hpp"

namespace thermal_cbf {

UnknownIndex::UnknownIndex(const RegionLabels& labels)
    : index_(labels.height(), labels.width(), kNone) {
  for (std::size_t i = 0; i < labels.height(); ++i) {
    for (std::size_t j = 0; j < labels.width(); ++j) {
      if (labels.label(i, j) == Region::Transition) {
        index_(i, j) = cells_.size();
        cells_.push_back({static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j)});
      }
    }
  }
}

std::optional<std::size_t> UnknownIndex::index_of(Cell c) const {
  if (!index_.contains(c) || index_[c] == kNone) return std::nullopt;
  return index_[c];
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

UnknownIndex index_unknowns(const RegionLabels& labels) { return UnknownIndex(labels); }

LinearSystem assemble(const RegionLabels& labels, const UnknownIndex& index,
                      const BoundaryValues& bv) {
  if (index.height() != labels.height() || index.width() != labels.width()) {
    throw ContractViolation("unknown index was not built from these labels");
  }
  // Neighbor order up, left, right, down; with row-major numbering this keeps
  // column indices sorted within each row once the diagonal is slotted in.
  static constexpr std::ptrdiff_t kDr[4] = {-1, 0, 0, 1};
  static constexpr std::ptrdiff_t kDc[4] = {0, -1, 1, 0};

  const std::size_t n = index.count();
  LinearSystem sys;
  sys.matrix.n = n;
  sys.matrix.row_ptr.assign(1, 0);
  sys.matrix.row_ptr.reserve(n + 1);
  sys.matrix.col_idx.reserve(5 * n);
  sys.matrix.values.reserve(5 * n);
  sys.rhs.assign(n, 0.0);

  const auto& lab = labels.label;
  for (std::size_t u = 0; u < n; ++u) {
    const Cell c = index.cell_of(u);
    double rhs = 0.0;
    bool diagonal_placed = false;
    for (int k = 0; k < 4; ++k) {
      const Cell nb{c.row + kDr[k], c.col + kDc[k]};
      if (k == 2 && !diagonal_placed) {
        sys.matrix.col_idx.push_back(u);
        sys.matrix.values.push_back(4.0);
        diagonal_placed = true;
      }
      if (!lab.contains(nb)) {
        rhs += bv.b_val;
        continue;
      }
      switch (lab[nb]) {
        case Region::Obstacle:
          rhs -= bv.a;
          break;
        case Region::Safe:
          rhs += bv.b_val;
          break;
        case Region::Transition:
          sys.matrix.col_idx.push_back(index.raw_index(nb.row, nb.col));
          sys.matrix.values.push_back(-1.0);
          break;
      }
    }
    sys.rhs[u] = rhs;
    sys.matrix.row_ptr.push_back(sys.matrix.col_idx.size());
  }
  return sys;
}

std::vector<double> dense_oracle_solve(const LinearSystem& sys, std::size_t max_n) {
  const std::size_t n = sys.size();
  if (n > max_n) {
    throw OracleRefusal("dense oracle refuses N=" + std::to_string(n) + " above cap " +
                        std::to_string(max_n));
  }
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = sys.matrix.row_ptr[i]; k < sys.matrix.row_ptr[i + 1]; ++k) {
      a[i * n + sys.matrix.col_idx[k]] = sys.matrix.values[k];
    }
  }
  std::vector<double> x(sys.rhs);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < 1e-14) {
      throw std::logic_error("dense oracle hit a singular pivot; the assembly is inconsistent");
    }
    if (pivot != col) {
      std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(col * n),
                       a.begin() + static_cast<std::ptrdiff_t>((col + 1) * n),
                       a.begin() + static_cast<std::ptrdiff_t>(pivot * n));
      std::swap(x[col], x[pivot]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      x[r] -= f * x[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * x[c];
    x[i] = s / a[i * n + i];
  }
  return x;
}

void write_matrix_market(std::ostream& out, const CsrMatrix& m) {
  std::size_t lower = 0;
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) lower += m.col_idx[k] <= i;
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << m.n << ' ' << m.n << ' ' << lower << '\n';
  char buf[64];
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      if (m.col_idx[k] > i) continue;
      std::snprintf(buf, sizeof buf, "%.17g", m.values[k]);
      out << i + 1 << ' ' << m.col_idx[k] + 1 << ' ' << buf << '\n';
    }
  }
}

void write_vector(std::ostream& out, std::span<const double> v) {
  char buf[64];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf << '\n';
  }
}

}  // namespace thermal_cbf
