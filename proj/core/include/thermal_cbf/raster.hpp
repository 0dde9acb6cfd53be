#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "thermal_cbf/error.hpp"
#include "thermal_cbf/geometry.hpp"

namespace thermal_cbf {

/// Dense row-major H x W array.
template <class T>
class Raster {
 public:
  Raster() = default;
  Raster(std::size_t height, std::size_t width, T fill = T{})
      : height_(height), width_(width), data_(height * width, fill) {}
  Raster(std::size_t height, std::size_t width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    if (data_.size() != height_ * width_) {
      throw ContractViolation("raster payload size does not match height*width");
    }
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(std::ptrdiff_t row, std::ptrdiff_t col) const noexcept {
    return row >= 0 && col >= 0 && static_cast<std::size_t>(row) < height_ &&
           static_cast<std::size_t>(col) < width_;
  }
  bool contains(Cell c) const noexcept { return contains(c.row, c.col); }

  T& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
  T& operator[](Cell c) { return (*this)(c.row, c.col); }
  const T& operator[](Cell c) const { return (*this)(c.row, c.col); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<T> data_;
};

}  // namespace thermal_cbf
