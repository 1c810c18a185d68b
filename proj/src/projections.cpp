#include "zep/projections.hpp"

#include <string>

#include "zep/error.hpp"

namespace zep {

namespace {

void require_inside(const Rect& outer, const Rect& rect, const char* what) {
  if (!rect.valid() || !outer.contains(rect)) {
    throw Error(ErrorCode::OutOfBounds, std::string(what) + ": rectangle outside raster");
  }
}

struct GrayView {
  const GrayImage& img;
  Rect extent() const { return img.bounds(); }
  std::int64_t at(int r, int c) const { return img.at(r, c); }
};

struct EnergyView {
  const SobelEnergy& energy;
  Rect extent() const { return energy.origin; }
  std::int64_t at(int r, int c) const { return energy.at(r, c); }
};

// Sizes `p` for n elements, reusing its storage.
void reset(Projection& p, Axis axis, std::int64_t divisor, std::size_t n) {
  p.axis = axis;
  p.divisor = divisor;
  p.sums.resize(n);
  p.values.resize(n);
}

void finish(Projection& p) {
  const double d = static_cast<double>(p.divisor);
  for (std::size_t k = 0; k < p.sums.size(); ++k) {
    p.values[k] = static_cast<double>(p.sums[k]) / d;
  }
}

template <class View>
void naive(const View& view, const Rect& rect, Axis axis, Projection& p) {
  require_inside(view.extent(), rect, "integral_projection_naive");
  if (axis == Axis::Horizontal) {
    reset(p, axis, rect.height(), static_cast<std::size_t>(rect.width()));
    for (int j = rect.col_min; j <= rect.col_max; ++j) {
      std::int64_t s = 0;
      for (int i = rect.row_min; i <= rect.row_max; ++i) s += view.at(i, j);
      p.sums[static_cast<std::size_t>(j - rect.col_min)] = s;
    }
  } else {
    reset(p, axis, rect.width(), static_cast<std::size_t>(rect.height()));
    for (int i = rect.row_min; i <= rect.row_max; ++i) {
      std::int64_t s = 0;
      for (int j = rect.col_min; j <= rect.col_max; ++j) s += view.at(i, j);
      p.sums[static_cast<std::size_t>(i - rect.row_min)] = s;
    }
  }
  finish(p);
}

template <class View>
Projection naive(const View& view, const Rect& rect, Axis axis) {
  Projection p;
  naive(view, rect, axis, p);
  return p;
}

}  // namespace

Projection integral_projection_naive(const GrayImage& img, const Rect& rect, Axis axis) {
  return naive(GrayView{img}, rect, axis);
}

Projection integral_projection_naive(const SobelEnergy& energy, const Rect& rect, Axis axis) {
  return naive(EnergyView{energy}, rect, axis);
}

SobelEnergy sobel_energy(const GrayImage& img) { return sobel_energy(img, img.bounds()); }

SobelEnergy sobel_energy(const GrayImage& img, const Rect& region) {
  if (img.width() < 3 || img.height() < 3) {
    throw Error(ErrorCode::InvalidArgument, "sobel_energy needs at least a 3x3 image");
  }
  require_inside(img.bounds(), region, "sobel_energy");
  SobelEnergy out;
  out.origin = region;
  out.values.assign(static_cast<std::size_t>(region.width()) * region.height(), 0);
  const int last_row = img.height() - 1;
  const int last_col = img.width() - 1;
  for (int r = region.row_min; r <= region.row_max; ++r) {
    if (r == 0 || r == last_row) continue;
    const auto up = img.row(r - 1);
    const auto mid = img.row(r);
    const auto down = img.row(r + 1);
    std::int32_t* dst =
        out.values.data() + static_cast<std::size_t>(r - region.row_min) * region.width();
    for (int c = region.col_min; c <= region.col_max; ++c) {
      if (c == 0 || c == last_col) continue;
      // S_H responds to horizontal edges (vertical derivative), S_V to vertical ones.
      const int sh =
          (down[c - 1] + 2 * down[c] + down[c + 1]) - (up[c - 1] + 2 * up[c] + up[c + 1]);
      const int sv =
          (up[c + 1] + 2 * mid[c + 1] + down[c + 1]) - (up[c - 1] + 2 * mid[c - 1] + down[c - 1]);
      dst[c - region.col_min] = sh * sh + sv * sv;
    }
  }
  return out;
}

Projection edge_projection_naive(const GrayImage& img, const Rect& rect, Axis axis) {
  require_inside(img.bounds(), rect, "edge_projection_naive");
  return naive(EnergyView{sobel_energy(img, rect)}, rect, axis);
}

Projection edge_projection_naive(const SobelEnergy& energy, const Rect& rect, Axis axis) {
  return naive(EnergyView{energy}, rect, axis);
}

template <class Raster>
OrientedIntegralImages OrientedIntegralImages::build(const Raster& raster, const Rect& region) {
  OrientedIntegralImages t;
  t.extent_ = region;
  const int h = region.height();
  const int w = region.width();
  const auto hs = static_cast<std::size_t>(h);
  const auto ws = static_cast<std::size_t>(w);
  t.col_cumsum_.assign(ws * (hs + 1), 0);
  t.row_cumsum_.assign(hs * (ws + 1), 0);
  // One pass in raster order; each pixel feeds its column and its row line.
  for (std::size_t i = 0; i < hs; ++i) {
    const std::int64_t* above = t.col_cumsum_.data() + i * ws;
    std::int64_t* below = t.col_cumsum_.data() + (i + 1) * ws;
    for (std::size_t j = 0; j < ws; ++j) {
      const std::int64_t v =
          raster.at(region.row_min + static_cast<int>(i), region.col_min + static_cast<int>(j));
      below[j] = above[j] + v;
      t.row_cumsum_[(j + 1) * hs + i] = t.row_cumsum_[j * hs + i] + v;
    }
  }
  return t;
}

OrientedIntegralImages build_oriented_integrals(const GrayImage& img, const Rect& region) {
  require_inside(img.bounds(), region, "build_oriented_integrals");
  return OrientedIntegralImages::build(GrayView{img}, region);
}

OrientedIntegralImages build_oriented_integrals(const SobelEnergy& energy) {
  return OrientedIntegralImages::build(EnergyView{energy}, energy.origin);
}

void fast_projection(const OrientedIntegralImages& tables, const Rect& rect, Axis axis,
                     Projection& out) {
  require_inside(tables.extent(), rect, "fast_projection");
  const Rect& e = tables.extent();
  // Horizontal: column sums are the difference of two row-indexed lines;
  // vertical: row sums are the difference of two column-indexed lines.
  const std::int64_t* hi;
  const std::int64_t* lo;
  if (axis == Axis::Horizontal) {
    reset(out, axis, rect.height(), static_cast<std::size_t>(rect.width()));
    hi = tables.col_line(rect.row_max + 1) + (rect.col_min - e.col_min);
    lo = tables.col_line(rect.row_min) + (rect.col_min - e.col_min);
  } else {
    reset(out, axis, rect.width(), static_cast<std::size_t>(rect.height()));
    hi = tables.row_line(rect.col_max + 1) + (rect.row_min - e.row_min);
    lo = tables.row_line(rect.col_min) + (rect.row_min - e.row_min);
  }
  std::int64_t* sums = out.sums.data();
  for (std::size_t k = 0; k < out.sums.size(); ++k) sums[k] = hi[k] - lo[k];
  finish(out);
}

Projection fast_projection(const OrientedIntegralImages& tables, const Rect& rect, Axis axis) {
  Projection p;
  fast_projection(tables, rect, axis, p);
  return p;
}

int scan_positions(int extent, int window, int stride) {
  if (window > extent) return 0;
  return (extent - window) / stride + 1;
}

namespace {

std::vector<Rect> window_grid(const GrayImage& img, const Rect& roi, int window_h, int window_w,
                              int stride) {
  require_inside(img.bounds(), roi, "scan_projections");
  if (window_h < 1 || window_w < 1 || stride < 1) {
    throw Error(ErrorCode::InvalidArgument, "window and stride must be >= 1");
  }
  if (window_h > roi.height() || window_w > roi.width()) {
    throw Error(ErrorCode::OutOfBounds, "scan window larger than the ROI");
  }
  const int nr = scan_positions(roi.height(), window_h, stride);
  const int nc = scan_positions(roi.width(), window_w, stride);
  std::vector<Rect> grid;
  grid.reserve(static_cast<std::size_t>(nr) * nc);
  for (int a = 0; a < nr; ++a) {
    for (int b = 0; b < nc; ++b) {
      grid.push_back(Rect::from_origin(roi.row_min + a * stride, roi.col_min + b * stride, window_h,
                                       window_w));
    }
  }
  return grid;
}

}  // namespace

void scan_projections(const GrayImage& img, const Rect& roi, int window_h, int window_w, int stride,
                      std::vector<WindowProjections>& out) {
  const auto grid = window_grid(img, roi, window_h, window_w, stride);
  const auto gray = build_oriented_integrals(img, roi);
  const auto edges = build_oriented_integrals(sobel_energy(img, roi));

  out.resize(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const Rect& w = grid[static_cast<std::size_t>(k)];
    WindowProjections& o = out[static_cast<std::size_t>(k)];
    o.window = w;
    fast_projection(gray, w, Axis::Horizontal, o.ph);
    fast_projection(gray, w, Axis::Vertical, o.pv);
    fast_projection(edges, w, Axis::Horizontal, o.eh);
    fast_projection(edges, w, Axis::Vertical, o.ev);
  }
}

std::vector<WindowProjections> scan_projections(const GrayImage& img, const Rect& roi, int window_h,
                                                int window_w, int stride) {
  std::vector<WindowProjections> out;
  scan_projections(img, roi, window_h, window_w, stride, out);
  return out;
}

void scan_projections_naive(const GrayImage& img, const Rect& roi, int window_h, int window_w,
                            int stride, std::vector<WindowProjections>& out) {
  const auto grid = window_grid(img, roi, window_h, window_w, stride);
  const auto energy = sobel_energy(img, roi);
  out.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Rect& w = grid[k];
    WindowProjections& o = out[k];
    o.window = w;
    naive(GrayView{img}, w, Axis::Horizontal, o.ph);
    naive(GrayView{img}, w, Axis::Vertical, o.pv);
    naive(EnergyView{energy}, w, Axis::Horizontal, o.eh);
    naive(EnergyView{energy}, w, Axis::Vertical, o.ev);
  }
}

std::vector<WindowProjections> scan_projections_naive(const GrayImage& img, const Rect& roi,
                                                      int window_h, int window_w, int stride) {
  std::vector<WindowProjections> out;
  scan_projections_naive(img, roi, window_h, window_w, stride, out);
  return out;
}

}  // namespace zep
