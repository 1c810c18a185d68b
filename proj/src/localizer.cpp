#include "zep/localizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "zep/encoder.hpp"
#include "zep/error.hpp"
#include "zep/projections.hpp"

namespace zep {

namespace {

constexpr int kMinFaceSide = 32;
constexpr double kRejected = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Point FaceContext::to_source(const Point& working) const {
  const double sy = static_cast<double>(face_rect.height()) / face.height();
  const double sx = static_cast<double>(face_rect.width()) / face.width();
  return {face_rect.row_min + (working.row + 0.5) * sy - 0.5,
          face_rect.col_min + (working.col + 0.5) * sx - 0.5};
}

Point FaceContext::to_working(const Point& source) const {
  const double sy = static_cast<double>(face.height()) / face_rect.height();
  const double sx = static_cast<double>(face.width()) / face_rect.width();
  return {(source.row - face_rect.row_min + 0.5) * sy - 0.5,
          (source.col - face_rect.col_min + 0.5) * sx - 0.5};
}

Rect eye_roi(const Config& cfg, int size, bool left) {
  const auto at = [size](double frac) { return static_cast<int>(std::lround(frac * size)); };
  const double c0 = left ? cfg.roi_left_col_begin : cfg.roi_right_col_begin;
  const double c1 = left ? cfg.roi_left_col_end : cfg.roi_right_col_end;
  Rect r{at(cfg.roi_row_begin), at(cfg.roi_row_end) - 1, at(c0), at(c1) - 1};
  if (!r.valid()) throw Error(ErrorCode::InvalidArgument, "eye ROI fractions give an empty ROI");
  return r;
}

FaceContext make_face_context(const GrayImage& img, const Rect& face_rect, const Config& cfg) {
  if (!face_rect.valid() || !img.bounds().contains(face_rect)) {
    throw Error(ErrorCode::OutOfBounds, "face rectangle outside the image");
  }
  if (face_rect.width() < kMinFaceSide || face_rect.height() < kMinFaceSide) {
    throw Error(ErrorCode::InvalidArgument,
                "face rectangle smaller than " + std::to_string(kMinFaceSide) + " pixels");
  }
  FaceContext ctx;
  ctx.face_rect = face_rect;
  const GrayImage region = face_rect == img.bounds() ? img : crop(img, face_rect);
  ctx.face = resize_bilinear(region, cfg.face_size, cfg.face_size);
  ctx.left_roi = eye_roi(cfg, cfg.face_size, true);
  ctx.right_roi = eye_roi(cfg, cfg.face_size, false);
  if (!ctx.face.bounds().contains(ctx.left_roi) || !ctx.face.bounds().contains(ctx.right_roi)) {
    throw Error(ErrorCode::InvalidArgument, "eye ROIs fall outside the working face");
  }
  ctx.illumination = detect_illumination(ctx.face, ctx.left_roi, ctx.right_roi, cfg);
  return ctx;
}

namespace {

double mean_over(const GrayImage& img, const Rect& r) {
  if (!r.valid()) return 0.0;
  std::int64_t s = 0;
  for (int i = r.row_min; i <= r.row_max; ++i) {
    for (int j = r.col_min; j <= r.col_max; ++j) s += img.at(i, j);
  }
  return static_cast<double>(s) / (static_cast<double>(r.height()) * r.width());
}

// Top half takes the extra row of an odd-height ROI.
std::pair<double, double> half_means(const GrayImage& img, const Rect& roi) {
  const int top_rows = (roi.height() + 1) / 2;
  const Rect top{roi.row_min, roi.row_min + top_rows - 1, roi.col_min, roi.col_max};
  const Rect bottom{roi.row_min + top_rows, roi.row_max, roi.col_min, roi.col_max};
  return {mean_over(img, top), bottom.valid() ? mean_over(img, bottom) : mean_over(img, top)};
}

double ratio(double num, double den) {
  if (den == 0.0) {
    return num == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                      : std::numeric_limits<double>::infinity();
  }
  return num / den;
}

}  // namespace

IlluminationRatios illumination_ratios(const GrayImage& face, const Rect& left_roi,
                                       const Rect& right_roi) {
  if (!face.bounds().contains(left_roi) || !face.bounds().contains(right_roi)) {
    throw Error(ErrorCode::OutOfBounds, "eye ROI outside the face");
  }
  const auto [lt, lb] = half_means(face, left_roi);
  const auto [rt, rb] = half_means(face, right_roi);
  return {ratio(lt, lb), ratio(rt, rb), ratio(lt + lb, rt + rb)};
}

Illumination detect_illumination(const GrayImage& face, const Rect& left_roi, const Rect& right_roi,
                                 const Config& cfg) {
  const IlluminationRatios r = illumination_ratios(face, left_roi, right_roi);
  const auto inside = [&](double v) {
    // NaN (an all-black half over an all-black half) fails both comparisons.
    return v >= cfg.illumination_ratio_min && v <= cfg.illumination_ratio_max;
  };
  return inside(r.left) && inside(r.right) && inside(r.horizontal) ? Illumination::Frontal
                                                                   : Illumination::Lateral;
}

std::size_t CandidateMask::count() const {
  return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
}

CandidateMask darkness_mask(const GrayImage& face, const Rect& roi, double theta) {
  if (!roi.valid() || !face.bounds().contains(roi)) {
    throw Error(ErrorCode::OutOfBounds, "darkness_mask ROI outside the face");
  }
  int peak = 0;
  for (int i = roi.row_min; i <= roi.row_max; ++i) {
    for (int j = roi.col_min; j <= roi.col_max; ++j) peak = std::max<int>(peak, face.at(i, j));
  }
  const double limit = (1.0 - theta) * peak;
  CandidateMask mask;
  mask.roi = roi;
  mask.keep.reserve(static_cast<std::size_t>(roi.width()) * roi.height());
  for (int i = roi.row_min; i <= roi.row_max; ++i) {
    for (int j = roi.col_min; j <= roi.col_max; ++j) mask.keep.push_back(face.at(i, j) <= limit);
  }
  return mask;
}

bool ZepImage::accepted(int r, int c) const { return !std::isnan(response(r, c)); }

std::size_t ZepImage::accepted_count() const {
  return static_cast<std::size_t>(
      std::count_if(responses.begin(), responses.end(), [](double v) { return !std::isnan(v); }));
}

bool operator==(const ZepImage& a, const ZepImage& b) {
  if (a.origin_row != b.origin_row || a.origin_col != b.origin_col || a.stride != b.stride ||
      a.rows != b.rows || a.cols != b.cols || a.responses.size() != b.responses.size()) {
    return false;
  }
  return std::memcmp(a.responses.data(), b.responses.data(), a.responses.size() * sizeof(double)) ==
         0;
}

Rect patch_window(int center_row, int center_col, int patch, int face_w, int face_h) {
  const int half = patch / 2;
  const int r0 = std::clamp(center_row - half, 0, face_h - patch);
  const int c0 = std::clamp(center_col - half, 0, face_w - patch);
  return Rect::from_origin(r0, c0, patch, patch);
}

double response_shift(const ModeParams& mode) {
  return mode.acceptance_threshold < 0.0 ? -mode.acceptance_threshold : 0.0;
}

ZepImage scan(const FaceContext& ctx, const Rect& roi, const Mlp& model, const Config& cfg) {
  const ModeParams& mode = cfg.mode(ctx.illumination);
  if (model.head != mode.head) {
    throw Error(ErrorCode::InvalidArgument, std::string("model head ") + to_string(model.head) +
                                                " does not match the " +
                                                to_string(ctx.illumination) + " branch");
  }
  if (model.n_in != static_cast<int>(zep_length(cfg.encoder))) {
    throw Error(ErrorCode::DimensionMismatch, "model input width does not match the ZEP length");
  }
  const GrayImage& face = ctx.face;
  const int patch = cfg.patch_size;
  if (face.width() < patch || face.height() < patch) {
    throw Error(ErrorCode::OutOfBounds, "working face smaller than the scan window");
  }
  if (!roi.valid() || !face.bounds().contains(roi)) {
    throw Error(ErrorCode::OutOfBounds, "scan ROI outside the working face");
  }

  ZepImage z;
  z.stride = cfg.scan_stride;
  z.origin_row = roi.row_min;
  z.origin_col = roi.col_min;
  z.rows = (roi.height() + z.stride - 1) / z.stride;
  z.cols = (roi.width() + z.stride - 1) / z.stride;
  z.threshold = mode.acceptance_threshold;
  z.responses.assign(static_cast<std::size_t>(z.rows) * z.cols, kRejected);

  const CandidateMask mask = darkness_mask(face, roi, mode.darkness_threshold);
  const auto window_at = [&](int a, int b) {
    return patch_window(roi.row_min + a * z.stride, roi.col_min + b * z.stride, patch, face.width(),
                        face.height());
  };
  const Rect first = window_at(0, 0);
  const Rect last = window_at(z.rows - 1, z.cols - 1);
  const Rect region{first.row_min, last.row_max, first.col_min, last.col_max};
  const OrientedIntegralImages gray = build_oriented_integrals(face, region);
  const OrientedIntegralImages edges = build_oriented_integrals(sobel_energy(face, region));

  const auto cells = static_cast<std::ptrdiff_t>(z.responses.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t k = 0; k < cells; ++k) {
    const int a = static_cast<int>(k / z.cols);
    const int b = static_cast<int>(k % z.cols);
    if (!mask.at(roi.row_min + a * z.stride, roi.col_min + b * z.stride)) continue;
    const Rect w = window_at(a, b);
    const ZepFeature f = assemble_zep(fast_projection(gray, w, Axis::Horizontal),
                                      fast_projection(gray, w, Axis::Vertical),
                                      fast_projection(edges, w, Axis::Horizontal),
                                      fast_projection(edges, w, Axis::Vertical), cfg.encoder);
    const double y = forward(model, f.values);
    if (y > mode.acceptance_threshold) z.responses[static_cast<std::size_t>(k)] = y;
  }
  return z;
}

std::vector<Region> segment_regions(const ZepImage& z, double shift) {
  std::vector<Region> regions;
  std::vector<int> label(z.responses.size(), -1);
  std::vector<Cell> stack;
  for (int r = 0; r < z.rows; ++r) {
    for (int c = 0; c < z.cols; ++c) {
      const auto seed = static_cast<std::size_t>(r) * z.cols + c;
      if (!z.accepted(r, c) || label[seed] >= 0) continue;
      const int id = static_cast<int>(regions.size());
      Region reg;
      reg.bounds = {r, r, c, c};
      label[seed] = id;
      stack.push_back({r, c});
      while (!stack.empty()) {
        const Cell cell = stack.back();
        stack.pop_back();
        reg.cells.push_back(cell);
        reg.mass += z.response(cell.row, cell.col) + shift;
        reg.bounds.row_min = std::min(reg.bounds.row_min, cell.row);
        reg.bounds.row_max = std::max(reg.bounds.row_max, cell.row);
        reg.bounds.col_min = std::min(reg.bounds.col_min, cell.col);
        reg.bounds.col_max = std::max(reg.bounds.col_max, cell.col);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = cell.row + dr;
            const int nc = cell.col + dc;
            if (nr < 0 || nc < 0 || nr >= z.rows || nc >= z.cols) continue;
            const auto n = static_cast<std::size_t>(nr) * z.cols + nc;
            if (label[n] >= 0 || !z.accepted(nr, nc)) continue;
            label[n] = id;
            stack.push_back({nr, nc});
          }
        }
      }
      std::sort(reg.cells.begin(), reg.cells.end(), [](const Cell& x, const Cell& y) {
        return x.row != y.row ? x.row < y.row : x.col < y.col;
      });
      double rows = 0.0;
      for (const Cell& cell : reg.cells) rows += cell.row;
      reg.centroid_row = rows / static_cast<double>(reg.cells.size());
      regions.push_back(std::move(reg));
    }
  }
  return regions;
}

Region select_region(const std::vector<Region>& regions, RegionRule rule, double lower_band) {
  if (regions.empty()) throw Error(ErrorCode::NoCandidates, "no candidate regions");
  std::size_t largest = 0;
  for (const Region& r : regions) largest = std::max(largest, r.size());

  const Region* best = nullptr;
  if (rule == RegionRule::Largest) {
    for (const Region& r : regions) {
      if (!best || r.size() > best->size() ||
          (r.size() == best->size() &&
           (r.mass > best->mass ||
            (r.mass == best->mass && r.centroid_row > best->centroid_row)))) {
        best = &r;
      }
    }
  } else {
    // Lowest region among those comparable in size to the largest one.
    const double floor_size = lower_band * static_cast<double>(largest);
    for (const Region& r : regions) {
      if (static_cast<double>(r.size()) < floor_size) continue;
      if (!best || r.centroid_row > best->centroid_row ||
          (r.centroid_row == best->centroid_row && r.mass > best->mass)) {
        best = &r;
      }
    }
  }
  return *best;
}

Point eye_center(const Region& region, const ZepImage& z, CenterRule rule, double shift) {
  if (region.cells.empty()) throw Error(ErrorCode::InvalidArgument, "empty region");
  double gr = 0.0;
  double gc = 0.0;
  if (rule == CenterRule::WeightedCentroid) {
    double total = 0.0;
    for (const Cell& cell : region.cells) {
      const double w = z.response(cell.row, cell.col) + shift;
      total += w;
      gr += w * cell.row;
      gc += w * cell.col;
    }
    if (!(total > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "region has no positive response weight");
    }
    gr /= total;
    gc /= total;
  } else {
    gr = 0.5 * (region.bounds.row_min + region.bounds.row_max);
    gc = 0.5 * (region.bounds.col_min + region.bounds.col_max);
  }
  return {z.origin_row + z.stride * gr, z.origin_col + z.stride * gc};
}

FaceResult localize_face(const GrayImage& img, const Rect& face_rect, const Mlp& frontal_model,
                         const Mlp& lateral_model, const Config& cfg) {
  const FaceContext ctx = make_face_context(img, face_rect, cfg);
  const ModeParams& mode = cfg.mode(ctx.illumination);
  const Mlp& model = ctx.illumination == Illumination::Frontal ? frontal_model : lateral_model;
  const double shift = response_shift(mode);

  FaceResult result;
  result.illumination = ctx.illumination;
  const auto run_eye = [&](const Rect& roi) -> std::optional<EyeEstimate> {
    const ZepImage z = scan(ctx, roi, model, cfg);
    const auto regions = segment_regions(z, shift);
    if (regions.empty()) return std::nullopt;
    const Region chosen = select_region(regions, mode.region_rule, cfg.lower_region_band);
    const Point working = eye_center(chosen, z, mode.center_rule, shift);
    double mean_response = 0.0;
    for (const Cell& cell : chosen.cells) mean_response += z.response(cell.row, cell.col);
    mean_response /= static_cast<double>(chosen.size());
    return EyeEstimate{ctx.to_source(working), mean_response};
  };
  result.left = run_eye(ctx.left_roi);
  result.right = run_eye(ctx.right_roi);
  return result;
}

EyePair localize(const GrayImage& img, const Rect& face_rect, const Mlp& frontal_model,
                 const Mlp& lateral_model, const Config& cfg) {
  const FaceResult r = localize_face(img, face_rect, frontal_model, lateral_model, cfg);
  if (!r.left) throw Error(ErrorCode::NoCandidates, "left eye: no candidate regions");
  if (!r.right) throw Error(ErrorCode::NoCandidates, "right eye: no candidate regions");
  return {r.left->center, r.right->center, r.left->confidence, r.right->confidence, r.illumination};
}

}  // namespace zep
