#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "zep/encoder.hpp"
#include "zep/mlp.hpp"

namespace zep {

enum class Illumination { Frontal, Lateral };
enum class RegionRule { LargestLower, Largest };
enum class CenterRule { WeightedCentroid, BoundingRectCenter };

const char* to_string(Illumination mode);
const char* to_string(RegionRule rule);
const char* to_string(CenterRule rule);

/// One column of the per-illumination parameter table.
struct ModeParams {
  double darkness_threshold = 0.15;
  Head head = Head::Regression;
  double acceptance_threshold = 0.0;
  RegionRule region_rule = RegionRule::LargestLower;
  CenterRule center_rule = CenterRule::WeightedCentroid;
  std::string training_database = "georgiatech+authors";
};

struct Config {
  ModeParams frontal;
  ModeParams lateral{
      0.3, Head::Binary, -0.5, RegionRule::Largest, CenterRule::BoundingRectCenter, "yaleb"};

  EncoderConfig encoder;

  int face_size = 300;
  int patch_size = 71;
  int scan_stride = 2;

  // Eye ROIs as fractions of the face square, [begin, end).
  double roi_row_begin = 0.26;
  double roi_row_end = 0.50;
  double roi_left_col_begin = 0.25;
  double roi_left_col_end = 0.37;
  double roi_right_col_begin = 0.63;
  double roi_right_col_end = 0.75;

  double illumination_ratio_min = 0.5;
  double illumination_ratio_max = 1.75;

  // Regions at least this fraction of the largest compete on height.
  double lower_region_band = 0.6;

  int mlp_hidden = 0;  // 0: half the feature length
  int mlp_epochs = 50;
  double mlp_learning_rate = 0.01;
  // Distance (working-face pixels) at which the regression target reaches 0;
  // 0 selects patch_size / 3, the edge of the IoU-0.5 band.
  double regression_dmax = 0.0;
  // Extra far-from-eye negatives per eye drawn from the ROI during training.
  int background_per_eye = 50;

  const ModeParams& mode(Illumination m) const {
    return m == Illumination::Frontal ? frontal : lateral;
  }
  int hidden_width() const {
    return mlp_hidden > 0 ? mlp_hidden
                          : default_hidden_width(static_cast<int>(zep_length(encoder)));
  }
  double regression_distance_scale() const;
};

/// Applies one `key=value` assignment; unknown keys and bad values throw.
void apply_setting(Config& cfg, const std::string& key, const std::string& value);
/// Flat key=value file; '#' starts a comment.
Config load_config(const std::filesystem::path& path);
void print_config(const Config& cfg, std::ostream& out);

}  // namespace zep
