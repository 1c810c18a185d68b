#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zep/config.hpp"
#include "zep/dataset.hpp"
#include "zep/localizer.hpp"

namespace zep {

/// Worst-eye error normalized by the true inter-ocular distance. A missing
/// eye counts as an infinite error.
struct LocalizationError {
  double eps_left = 0;   // pixels
  double eps_right = 0;  // pixels
  double d_eye = 0;      // pixels
  double eps = 0;        // max(eps_left, eps_right) / d_eye

  double best() const;     // min of the two normalized eye errors
  double average() const;  // mean of the two normalized eye errors
};

LocalizationError stringent_error(const EyePair& found, const Annotation& truth);
LocalizationError stringent_error(const FaceResult& found, const Annotation& truth);

struct AccuracyCurve {
  std::vector<double> thresholds;
  std::vector<double> min_curve;  // worst eye
  std::vector<double> avg_curve;
  std::vector<double> max_curve;  // best eye
};

/// Fraction of images whose error is strictly below each (positive) threshold.
AccuracyCurve accuracy_curve(std::span<const LocalizationError> errors,
                             std::span<const double> thresholds);

/// Worst-eye accuracy at one threshold.
double accuracy_at(std::span<const LocalizationError> errors, double threshold);

inline constexpr double kPupilThreshold = 0.05;
inline constexpr double kIrisThreshold = 0.1;
inline constexpr double kScleraThreshold = 0.25;

struct Evaluation {
  std::vector<FaceResult> results;
  std::vector<LocalizationError> errors;
};

/// Localizes every face; parallel across faces, results in input order.
Evaluation evaluate(std::span<const LabeledImage> data, const Mlp& frontal_model,
                    const Mlp& lateral_model, const Config& cfg = {});

struct NoiseSweepRow {
  double sigma = 0;
  double accuracy = 0;  // worst-eye accuracy at eps < 0.1
};

/// Degrades every image with add_gaussian_noise(sigma) and re-localizes.
std::vector<NoiseSweepRow> noise_sweep(std::span<const LabeledImage> data, const Mlp& frontal_model,
                                       const Mlp& lateral_model, std::span<const double> sigmas,
                                       std::uint64_t seed, const Config& cfg = {});

/// fps * min(frame_w, frame_h) / cpu_score.
double tp_score(double fps, double frame_w, double frame_h, double cpu_score);

}  // namespace zep
