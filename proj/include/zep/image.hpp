#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace zep {

/// Inclusive row/column window. Row 0, column 0 is the top-left pixel.
struct Rect {
  int row_min = 0;
  int row_max = 0;
  int col_min = 0;
  int col_max = 0;

  int height() const { return row_max - row_min + 1; }
  int width() const { return col_max - col_min + 1; }
  bool valid() const { return row_min <= row_max && col_min <= col_max; }
  bool contains(const Rect& inner) const {
    return inner.row_min >= row_min && inner.row_max <= row_max && inner.col_min >= col_min &&
           inner.col_max <= col_max;
  }
  bool contains(int row, int col) const {
    return row >= row_min && row <= row_max && col >= col_min && col <= col_max;
  }

  static Rect from_origin(int row, int col, int height, int width) {
    return {row, row + height - 1, col, col + width - 1};
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Point {
  double row = 0.0;
  double col = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

/// 8-bit grayscale raster, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }
  Rect bounds() const { return {0, height_ - 1, 0, width_ - 1}; }

  std::uint8_t at(int row, int col) const {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint8_t& at(int row, int col) {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const std::uint8_t> row(int r) const {
    return {pixels_.data() + static_cast<std::size_t>(r) * width_,
            static_cast<std::size_t>(width_)};
  }
  std::span<const std::uint8_t> pixels() const { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

GrayImage load_pgm(const std::filesystem::path& path);
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Pixel-center aligned bilinear resampling in 16.16 fixed point, so that
/// resize(img + c) == resize(img) + c exactly whenever no pixel clips.
GrayImage resize_bilinear(const GrayImage& img, int new_w, int new_h);

/// Adds zero-mean Gaussian noise with standard deviation `sigma` gray levels.
GrayImage add_gaussian_noise(const GrayImage& img, double sigma, std::uint64_t seed);

GrayImage crop(const GrayImage& img, const Rect& rect);
GrayImage transpose(const GrayImage& img);
/// Saturating brightness offset.
GrayImage add_constant(const GrayImage& img, int offset);
/// Nearest-neighbor upscale: every pixel becomes a k_rows x k_cols block.
GrayImage stretch_nearest(const GrayImage& img, int k_rows, int k_cols);

}  // namespace zep
