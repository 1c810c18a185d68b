#pragma once

#include <cstdint>
#include <vector>

#include "zep/image.hpp"

namespace zep {

/// Horizontal: one value per column (P_H, E_H). Vertical: one per row.
enum class Axis { Horizontal, Vertical };

/// Per-pixel squared Sobel gradient magnitude over a region of a host image.
/// `origin` is the region in host coordinates; pixels on the outermost border
/// of the host image are 0.
struct SobelEnergy {
  Rect origin;
  std::vector<std::int32_t> values;

  int width() const { return origin.width(); }
  int height() const { return origin.height(); }
  /// Host-image coordinates.
  std::int32_t at(int row, int col) const {
    return values[static_cast<std::size_t>(row - origin.row_min) * width() +
                  (col - origin.col_min)];
  }
};

/// Projection of a rectangle. Elements are kept as exact integer sums with a
/// common divisor; `values` holds the averages sums / divisor.
struct Projection {
  Axis axis = Axis::Horizontal;
  std::int64_t divisor = 1;
  std::vector<std::int64_t> sums;
  std::vector<double> values;

  std::size_t size() const { return sums.size(); }
  friend bool operator==(const Projection&, const Projection&) = default;
};

/// Prefix sums along each column (down the rows) and along each row (across
/// the columns), each line led by a zero entry. Both tables are laid out so a
/// window's projection is the difference of two contiguous lines.
class OrientedIntegralImages {
 public:
  OrientedIntegralImages() = default;

  const Rect& extent() const { return extent_; }
  /// Sum of column `col` over rows [extent.row_min, row) in host coordinates;
  /// `row` may be extent.row_max + 1.
  std::int64_t col_prefix(int col, int row) const { return col_line(row)[col - extent_.col_min]; }
  std::int64_t row_prefix(int row, int col) const { return row_line(col)[row - extent_.row_min]; }
  /// col_prefix(c, row) for every column c of the extent, contiguous.
  const std::int64_t* col_line(int row) const {
    return col_cumsum_.data() + static_cast<std::size_t>(row - extent_.row_min) * extent_.width();
  }
  /// row_prefix(r, col) for every row r of the extent, contiguous.
  const std::int64_t* row_line(int col) const {
    return row_cumsum_.data() + static_cast<std::size_t>(col - extent_.col_min) * extent_.height();
  }

  friend OrientedIntegralImages build_oriented_integrals(const GrayImage&, const Rect&);
  friend OrientedIntegralImages build_oriented_integrals(const SobelEnergy&);

 private:
  template <class Raster>
  static OrientedIntegralImages build(const Raster& raster, const Rect& region);

  Rect extent_;
  std::vector<std::int64_t> col_cumsum_;  // height+1 lines of width
  std::vector<std::int64_t> row_cumsum_;  // width+1 lines of height
};

/// The four projections of one window.
struct WindowProjections {
  Rect window;
  Projection ph;
  Projection pv;
  Projection eh;
  Projection ev;
};

Projection integral_projection_naive(const GrayImage& img, const Rect& rect, Axis axis);
Projection integral_projection_naive(const SobelEnergy& energy, const Rect& rect, Axis axis);

/// Classical 3x3 Sobel, S = S_H^2 + S_V^2, over the whole image.
SobelEnergy sobel_energy(const GrayImage& img);
/// Sobel energy restricted to `region`; each value equals the whole-image one.
SobelEnergy sobel_energy(const GrayImage& img, const Rect& region);

Projection edge_projection_naive(const GrayImage& img, const Rect& rect, Axis axis);
Projection edge_projection_naive(const SobelEnergy& energy, const Rect& rect, Axis axis);

OrientedIntegralImages build_oriented_integrals(const GrayImage& img, const Rect& region);
inline OrientedIntegralImages build_oriented_integrals(const GrayImage& img) {
  return build_oriented_integrals(img, img.bounds());
}
OrientedIntegralImages build_oriented_integrals(const SobelEnergy& energy);

/// One subtraction per element on the oriented integral images.
Projection fast_projection(const OrientedIntegralImages& tables, const Rect& rect, Axis axis);
/// As above, writing into `out` and reusing its storage.
void fast_projection(const OrientedIntegralImages& tables, const Rect& rect, Axis axis,
                     Projection& out);

/// Number of stride-aligned positions of a `window` length along `extent`.
int scan_positions(int extent, int window, int stride);

/// Every stride-aligned window inside `roi`, row-major, with its (P_H, P_V,
/// E_H, E_V) taken from one table pair built over the ROI.
std::vector<WindowProjections> scan_projections(const GrayImage& img, const Rect& roi, int window_h,
                                                int window_w, int stride);
/// Overwrites `out` in place, so repeated scans reuse the buffers.
void scan_projections(const GrayImage& img, const Rect& roi, int window_h, int window_w, int stride,
                      std::vector<WindowProjections>& out);

/// Serial per-window reference for scan_projections.
std::vector<WindowProjections> scan_projections_naive(const GrayImage& img, const Rect& roi,
                                                      int window_h, int window_w, int stride);
void scan_projections_naive(const GrayImage& img, const Rect& roi, int window_h, int window_w,
                            int stride, std::vector<WindowProjections>& out);

}  // namespace zep
