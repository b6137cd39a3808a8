#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace lfdisp {

// Row-major 2D grid. x is the column index, y the row index.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : w_(width), h_(height),
        data_(static_cast<size_t>(width) * static_cast<size_t>(height), fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const { return w_; }
  int height() const { return h_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < w_ && y >= 0 && y < h_;
  }

  T& at(int x, int y) {
    assert(in_bounds(x, y));
    return data_[static_cast<size_t>(y) * w_ + x];
  }
  const T& at(int x, int y) const {
    assert(in_bounds(x, y));
    return data_[static_cast<size_t>(y) * w_ + x];
  }

  T* row(int y) { return data_.data() + static_cast<size_t>(y) * w_; }
  const T* row(int y) const { return data_.data() + static_cast<size_t>(y) * w_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return w_ == other.width() && h_ == other.height();
  }

  bool operator==(const Grid& other) const {
    return w_ == other.w_ && h_ == other.h_ && data_ == other.data_;
  }

 private:
  int w_ = 0;
  int h_ = 0;
  std::vector<T> data_;
};

// Grayscale radiance image, values in [0,1].
using Image = Grid<float>;

// Dense disparity map with a per-pixel validity mask. Values are finite
// wherever valid is nonzero.
struct DisparityMap {
  Grid<float> values;
  Grid<uint8_t> valid;

  DisparityMap() = default;
  DisparityMap(int width, int height)
      : values(width, height, 0.0f), valid(width, height, 0) {}

  int width() const { return values.width(); }
  int height() const { return values.height(); }

  size_t valid_count() const {
    size_t n = 0;
    for (uint8_t v : valid.data()) n += v ? 1 : 0;
    return n;
  }
};

}  // namespace lfdisp
