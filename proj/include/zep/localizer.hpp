#pragma once

#include <optional>
#include <vector>

#include "zep/config.hpp"
#include "zep/image.hpp"
#include "zep/mlp.hpp"

namespace zep {

struct FaceContext {
  Rect face_rect;  // in the source image
  GrayImage face;  // working face, face_size x face_size
  Rect left_roi;   // candidate eye centers, working-face coordinates
  Rect right_roi;
  Illumination illumination = Illumination::Frontal;

  /// Working-face pixel position to source-image coordinates.
  Point to_source(const Point& working) const;
  Point to_working(const Point& source) const;
};

/// Eye ROI rectangles for a square face of `size` pixels.
Rect eye_roi(const Config& cfg, int size, bool left);

FaceContext make_face_context(const GrayImage& img, const Rect& face_rect, const Config& cfg = {});

struct IlluminationRatios {
  double left = 0;
  double right = 0;
  double horizontal = 0;
};

IlluminationRatios illumination_ratios(const GrayImage& face, const Rect& left_roi,
                                       const Rect& right_roi);
Illumination detect_illumination(const GrayImage& face, const Rect& left_roi, const Rect& right_roi,
                                 const Config& cfg = {});

/// Row-major mask over `roi`; true keeps the pixel as a candidate center.
struct CandidateMask {
  Rect roi;
  std::vector<bool> keep;

  bool at(int row, int col) const {
    return keep[static_cast<std::size_t>(row - roi.row_min) * roi.width() + (col - roi.col_min)];
  }
  std::size_t count() const;
};

/// Keeps pixel p iff p <= (1 - theta) * max(roi).
CandidateMask darkness_mask(const GrayImage& face, const Rect& roi, double theta);

/// Thresholded MLP responses on the stride grid of candidate centers.
struct ZepImage {
  int origin_row = 0;  // working-face position of grid cell (0, 0)
  int origin_col = 0;
  int stride = 2;
  int rows = 0;
  int cols = 0;
  double threshold = 0;
  std::vector<double> responses;  // NaN marks rejected / filtered cells

  bool accepted(int r, int c) const;
  double response(int r, int c) const { return responses[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t accepted_count() const;
  friend bool operator==(const ZepImage& a, const ZepImage& b);
};

struct Cell {
  int row = 0;
  int col = 0;
};

struct Region {
  std::vector<Cell> cells;
  Rect bounds;      // grid coordinates
  double mass = 0;  // sum of shifted responses
  double centroid_row = 0;
  std::size_t size() const { return cells.size(); }
};

/// Window anchored on a candidate center and clamped inside the face.
Rect patch_window(int center_row, int center_col, int patch, int face_w, int face_h);

ZepImage scan(const FaceContext& ctx, const Rect& roi, const Mlp& model, const Config& cfg = {});

/// Response shift making accepted weights positive.
double response_shift(const ModeParams& mode);

std::vector<Region> segment_regions(const ZepImage& z, double shift);
Region select_region(const std::vector<Region>& regions, RegionRule rule, double lower_band = 0.6);
/// Working-face coordinates of the eye center chosen from `region`.
Point eye_center(const Region& region, const ZepImage& z, CenterRule rule, double shift);

struct EyeEstimate {
  Point center;  // source-image coordinates
  double confidence = 0;
};

struct FaceResult {
  Illumination illumination = Illumination::Frontal;
  std::optional<EyeEstimate> left;
  std::optional<EyeEstimate> right;
  bool complete() const { return left.has_value() && right.has_value(); }
};

struct EyePair {
  Point left;
  Point right;
  double left_confidence = 0;
  double right_confidence = 0;
  Illumination illumination = Illumination::Frontal;
  friend bool operator==(const EyePair&, const EyePair&) = default;
};

/// Full per-face pipeline; an eye without candidates is left empty.
FaceResult localize_face(const GrayImage& img, const Rect& face_rect, const Mlp& frontal_model,
                         const Mlp& lateral_model, const Config& cfg = {});

/// As localize_face, but a missing eye raises ErrorCode::NoCandidates.
EyePair localize(const GrayImage& img, const Rect& face_rect, const Mlp& frontal_model,
                 const Mlp& lateral_model, const Config& cfg = {});

}  // namespace zep
