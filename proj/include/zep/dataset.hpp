#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "zep/config.hpp"
#include "zep/image.hpp"
#include "zep/mlp.hpp"

namespace zep {

struct Annotation {
  std::string id;
  Rect face_rect;
  Point left_eye;  // image-left eye (smaller column)
  Point right_eye;
};

/// Parses `id,face_r0,face_r1,face_c0,face_c1,le_row,le_col,re_row,re_col`.
/// Errors name the 1-based line of the offending row.
std::vector<Annotation> load_annotations(const std::filesystem::path& path);
void save_annotations(const std::vector<Annotation>& rows, const std::filesystem::path& path);

enum class EyeSide { Left, Right };

struct PatchSample {
  std::vector<double> feature;
  double target = 0;
  std::string image_id;
  EyeSide eye = EyeSide::Left;
  int offset_row = 0;  // patch center minus rounded true center, working face
  int offset_col = 0;
};

/// Intersection over union of two equal squares offset by (dr, dc).
double square_iou(int side, int dr, int dc);

/// Offsets whose patch overlaps the centered one by more than 75% IoU
/// (positives, a 5x5 grid at stride 2) and the offsets in the (50%, 75%] band.
std::vector<std::pair<int, int>> positive_offsets(int patch);
std::vector<std::pair<int, int>> negative_band_offsets(int patch);

inline constexpr int kPositivesPerEye = 25;
inline constexpr int kNegativesPerEye = 100;

/// 25 positive and 100 negative patches per eye.
std::vector<PatchSample> extract_patches(const GrayImage& img, const Annotation& ann, Head head,
                                         std::uint64_t seed, const Config& cfg = {});

/// Extra negatives centered inside the eye ROI but outside the overlap band
/// (IoU <= 50%), seeded subsample of `count` per eye.
std::vector<PatchSample> extract_background_patches(const GrayImage& img, const Annotation& ann,
                                                    Head head, int count, std::uint64_t seed,
                                                    const Config& cfg = {});

struct LabeledImage {
  const GrayImage* image = nullptr;
  const Annotation* annotation = nullptr;
};

/// extract_patches plus `background_per_eye` background negatives for every
/// image, in input order. Per-image seeds derive from `seed` and the index.
std::vector<PatchSample> extract_samples(std::span<const LabeledImage> data, Head head,
                                         int background_per_eye, std::uint64_t seed,
                                         const Config& cfg = {});

/// Regression target for a patch centered `distance` working pixels away.
double regression_target(double distance, const Config& cfg);

struct SyntheticEyeSpec {
  double center_row = 112;
  double center_col = 93;
  double pupil_radius = 3.5;
  double iris_radius = 9;
  double eye_half_width = 18;  // sclera ellipse, fully open
  double eye_half_height = 10;
  double openness = 1;  // 0 closed, 1 fully open
  int pupil_level = 25;
  int iris_level = 85;
  int sclera_level = 232;
  int lid_level = 70;
  double brow_offset = 26;  // brow center above the pupil center
  double brow_half_width = 24;
  double brow_thickness = 6;
  int brow_level = 70;
};

struct SyntheticFaceSpec {
  SyntheticEyeSpec left;
  SyntheticEyeSpec right{.center_col = 207};
  int skin_level = 205;
  double shading_horizontal = 0;  // gain slope across the face, per half width
  double shading_vertical = 0;
  double noise_sigma = 0;
};

/// Renders a 300x300 face; the annotation carries the exact pupil centers.
std::pair<GrayImage, Annotation> synth_face(const SyntheticFaceSpec& spec, std::uint64_t seed,
                                            const std::string& id = "synthetic");

struct VariationRanges {
  double center_jitter_row = 6;
  double center_jitter_col = 4;
  double openness_min = 0.55;
  double openness_max = 1.0;
  double noise_min = 0;
  double noise_max = 10;
  double frontal_shading_max = 0.25;
  double lateral_shading_min = 1.15;
  double lateral_shading_max = 1.35;
  double lateral_fraction = 0.25;
};

enum class ShadingMix { Mixed, FrontalOnly, LateralOnly };

struct CorpusSpec {
  int n_faces = 20;
  VariationRanges ranges;
  std::uint64_t seed = 1;
  ShadingMix mix = ShadingMix::Mixed;
  std::string id_prefix = "face";
  int background_per_eye = 0;  // extract_background_patches count
};

struct SyntheticFace {
  GrayImage image;
  Annotation annotation;
  bool lateral_shading = false;
};

/// Face spec drawn from the ranges for one face seed.
SyntheticFaceSpec random_face_spec(const VariationRanges& ranges, std::uint64_t seed, bool lateral);
std::vector<SyntheticFace> synth_corpus(const CorpusSpec& spec);

struct Corpus {
  std::vector<SyntheticFace> faces;
  std::vector<PatchSample> samples;
};

/// Faces plus their extracted patches for one head.
Corpus build_corpus(const CorpusSpec& spec, Head head, const Config& cfg = {});

TrainingSet to_training_set(const std::vector<PatchSample>& samples, Head head);

/// Places a face (resized to `face_rect`) into a uniform canvas; returns the
/// canvas and the annotation mapped to canvas coordinates.
std::pair<GrayImage, Annotation> embed_face(const GrayImage& face, const Annotation& ann,
                                            int canvas_w, int canvas_h, const Rect& face_rect,
                                            std::uint8_t background = 128);

}  // namespace zep
