#include "zep/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "zep/encoder.hpp"
#include "zep/error.hpp"
#include "zep/localizer.hpp"
#include "zep/parallel.hpp"
#include "zep/projections.hpp"

namespace zep {

namespace {

constexpr const char* kAnnotationHeader =
    "id,face_r0,face_r1,face_c0,face_c1,le_row,le_col,re_row,re_col";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool inside(const Rect& r, const Point& p) {
  return p.row >= r.row_min && p.row <= r.row_max && p.col >= r.col_min && p.col <= r.col_max;
}

}  // namespace

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<Annotation> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("id,", 0) == 0) {
      if (line != kAnnotationHeader) {
        throw Error(ErrorCode::Malformed, path.string() + ":1: unexpected header '" + line + "'");
      }
      continue;
    }
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    const auto f = split_csv(line);
    if (f.size() != 9) {
      throw Error(ErrorCode::Malformed,
                  where + "expected 9 fields, found " + std::to_string(f.size()));
    }
    double v[8];
    for (int k = 0; k < 8; ++k) {
      const std::string& s = f[static_cast<std::size_t>(k + 1)];
      char* end = nullptr;
      v[k] = std::strtod(s.c_str(), &end);
      if (s.empty() || *end != '\0' || !std::isfinite(v[k])) {
        throw Error(ErrorCode::Malformed, where + "bad number '" + s + "'");
      }
    }
    for (int k = 0; k < 4; ++k) {
      if (v[k] != std::floor(v[k])) {
        throw Error(ErrorCode::Malformed, where + "face rectangle bounds must be integers");
      }
    }
    Annotation a;
    a.id = f[0];
    a.face_rect = {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
                   static_cast<int>(v[3])};
    a.left_eye = {v[4], v[5]};
    a.right_eye = {v[6], v[7]};
    if (a.id.empty()) throw Error(ErrorCode::Malformed, where + "empty id");
    if (!a.face_rect.valid()) throw Error(ErrorCode::Malformed, where + "empty face rectangle");
    if (!inside(a.face_rect, a.left_eye) || !inside(a.face_rect, a.right_eye)) {
      throw Error(ErrorCode::Malformed, where + "eye center outside the face rectangle");
    }
    rows.push_back(std::move(a));
  }
  return rows;
}

void save_annotations(const std::vector<Annotation>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << kAnnotationHeader << '\n';
  char buf[256];
  for (const Annotation& a : rows) {
    std::snprintf(buf, sizeof buf, ",%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n", a.face_rect.row_min,
                  a.face_rect.row_max, a.face_rect.col_min, a.face_rect.col_max, a.left_eye.row,
                  a.left_eye.col, a.right_eye.row, a.right_eye.col);
    out << a.id << buf;
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

double square_iou(int side, int dr, int dc) {
  const double ix = std::max(0, side - std::abs(dc));
  const double iy = std::max(0, side - std::abs(dr));
  const double inter = ix * iy;
  const double area = static_cast<double>(side) * side;
  return inter / (2.0 * area - inter);
}

std::vector<std::pair<int, int>> positive_offsets(int patch) {
  std::vector<std::pair<int, int>> out;
  for (int dr = -4; dr <= 4; dr += 2) {
    for (int dc = -4; dc <= 4; dc += 2) {
      if (square_iou(patch, dr, dc) <= 0.75) {
        throw Error(ErrorCode::InvalidArgument, "patch too small for the positive offset grid");
      }
      out.emplace_back(dr, dc);
    }
  }
  return out;
}

std::vector<std::pair<int, int>> negative_band_offsets(int patch) {
  std::vector<std::pair<int, int>> out;
  for (int dr = -patch; dr <= patch; ++dr) {
    for (int dc = -patch; dc <= patch; ++dc) {
      const double iou = square_iou(patch, dr, dc);
      if (iou > 0.5 && iou <= 0.75) out.emplace_back(dr, dc);
    }
  }
  return out;
}

double regression_target(double distance, const Config& cfg) {
  return std::clamp(1.0 - distance / cfg.regression_distance_scale(), 0.0, 1.0);
}

std::vector<PatchSample> extract_patches(const GrayImage& img, const Annotation& ann, Head head,
                                         std::uint64_t seed, const Config& cfg) {
  const FaceContext ctx = make_face_context(img, ann.face_rect, cfg);
  const GrayImage& face = ctx.face;
  const SobelEnergy energy = sobel_energy(face);
  const int patch = cfg.patch_size;
  const int half = patch / 2;

  const auto pos = positive_offsets(patch);
  auto band = negative_band_offsets(patch);
  if (band.size() < static_cast<std::size_t>(kNegativesPerEye)) {
    throw Error(ErrorCode::InvalidArgument, "negative overlap band has too few offsets");
  }

  std::mt19937_64 rng(seed);
  std::vector<PatchSample> out;
  out.reserve(2 * (pos.size() + kNegativesPerEye));
  for (EyeSide side : {EyeSide::Left, EyeSide::Right}) {
    const Point truth = ctx.to_working(side == EyeSide::Left ? ann.left_eye : ann.right_eye);
    const int cr = static_cast<int>(std::lround(truth.row));
    const int cc = static_cast<int>(std::lround(truth.col));

    // Seeded subsample of the band, without replacement.
    std::vector<std::pair<int, int>> neg = band;
    for (int k = 0; k < kNegativesPerEye; ++k) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), neg.size() - 1);
      std::swap(neg[static_cast<std::size_t>(k)], neg[pick(rng)]);
    }
    neg.resize(kNegativesPerEye);

    const auto emit = [&](const std::pair<int, int>& off, bool positive) {
      const int r = cr + off.first;
      const int c = cc + off.second;
      const Rect w = Rect::from_origin(r - half, c - half, patch, patch);
      if (!face.bounds().contains(w)) {
        throw Error(ErrorCode::OutOfBounds,
                    ann.id + ": eye too close to the face border for the overlap band");
      }
      PatchSample s;
      s.feature = assemble_zep(integral_projection_naive(face, w, Axis::Horizontal),
                               integral_projection_naive(face, w, Axis::Vertical),
                               edge_projection_naive(energy, w, Axis::Horizontal),
                               edge_projection_naive(energy, w, Axis::Vertical), cfg.encoder)
                      .values;
      if (head == Head::Binary) {
        s.target = positive ? 1.0 : -1.0;
      } else {
        s.target = regression_target(
            distance({static_cast<double>(r), static_cast<double>(c)}, truth), cfg);
      }
      s.image_id = ann.id;
      s.eye = side;
      s.offset_row = off.first;
      s.offset_col = off.second;
      out.push_back(std::move(s));
    };
    for (const auto& off : pos) emit(off, true);
    for (const auto& off : neg) emit(off, false);
  }
  return out;
}

std::vector<PatchSample> extract_background_patches(const GrayImage& img, const Annotation& ann,
                                                    Head head, int count, std::uint64_t seed,
                                                    const Config& cfg) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "background count must be >= 0");
  std::vector<PatchSample> out;
  if (count == 0) return out;
  const FaceContext ctx = make_face_context(img, ann.face_rect, cfg);
  const GrayImage& face = ctx.face;
  const SobelEnergy energy = sobel_energy(face);
  const int patch = cfg.patch_size;
  const int half = patch / 2;
  std::mt19937_64 rng(seed);
  for (EyeSide side : {EyeSide::Left, EyeSide::Right}) {
    const Point truth = ctx.to_working(side == EyeSide::Left ? ann.left_eye : ann.right_eye);
    const int cr = static_cast<int>(std::lround(truth.row));
    const int cc = static_cast<int>(std::lround(truth.col));
    const Rect roi = side == EyeSide::Left ? ctx.left_roi : ctx.right_roi;
    std::vector<std::pair<int, int>> offsets;
    for (int r = roi.row_min; r <= roi.row_max; ++r) {
      for (int c = roi.col_min; c <= roi.col_max; ++c) {
        const Rect w = Rect::from_origin(r - half, c - half, patch, patch);
        if (square_iou(patch, r - cr, c - cc) <= 0.5 && face.bounds().contains(w)) {
          offsets.emplace_back(r - cr, c - cc);
        }
      }
    }
    const auto take = std::min(offsets.size(), static_cast<std::size_t>(count));
    for (std::size_t k = 0; k < take; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, offsets.size() - 1);
      std::swap(offsets[k], offsets[pick(rng)]);
    }
    for (std::size_t k = 0; k < take; ++k) {
      const auto [dr, dc] = offsets[k];
      const int r = cr + dr;
      const int c = cc + dc;
      const Rect w = Rect::from_origin(r - half, c - half, patch, patch);
      PatchSample s;
      s.feature = assemble_zep(integral_projection_naive(face, w, Axis::Horizontal),
                               integral_projection_naive(face, w, Axis::Vertical),
                               edge_projection_naive(energy, w, Axis::Horizontal),
                               edge_projection_naive(energy, w, Axis::Vertical), cfg.encoder)
                      .values;
      s.target = head == Head::Binary
                     ? -1.0
                     : regression_target(
                           distance({static_cast<double>(r), static_cast<double>(c)}, truth), cfg);
      s.image_id = ann.id;
      s.eye = side;
      s.offset_row = dr;
      s.offset_col = dc;
      out.push_back(std::move(s));
    }
  }
  return out;
}

namespace {

struct EyeRaster {
  const SyntheticEyeSpec& eye;

  // Returns a gray level, or -1 where the eye assembly leaves skin visible.
  int sample(double r, double c) const {
    const double dy = r - eye.center_row;
    const double dx = c - eye.center_col;

    const double brow_row = -eye.brow_offset + 0.012 * dx * dx;
    if (std::abs(dx) <= eye.brow_half_width && std::abs(dy - brow_row) <= eye.brow_thickness / 2) {
      return eye.brow_level;
    }
    const double ax = eye.eye_half_width;
    if (eye.openness < 0.15) {
      // Closed: a lid crease through the eye center.
      const double crease = 0.006 * dx * dx;
      if (std::abs(dx) <= ax && std::abs(dy - crease) <= 1.5) return eye.lid_level;
      return -1;
    }
    const double ay = eye.eye_half_height * eye.openness;
    const double e = (dx / ax) * (dx / ax) + (dy / ay) * (dy / ay);
    if (e <= 1.0) {
      const double d = std::hypot(dx, dy);
      if (d <= eye.pupil_radius) return eye.pupil_level;
      if (d <= eye.iris_radius) return eye.iris_level;
      return eye.sclera_level;
    }
    if (dy < 0 && e <= 1.45) return eye.lid_level;
    return -1;
  }
};

}  // namespace

std::pair<GrayImage, Annotation> synth_face(const SyntheticFaceSpec& spec, std::uint64_t seed,
                                            const std::string& id) {
  constexpr int kSize = 300;
  for (const SyntheticEyeSpec* e : {&spec.left, &spec.right}) {
    if (!(e->pupil_radius > 0 && e->pupil_radius < e->iris_radius)) {
      throw Error(ErrorCode::InvalidArgument, "eye radii must satisfy 0 < pupil < iris");
    }
    if (e->openness < 0 || e->openness > 1) {
      throw Error(ErrorCode::InvalidArgument, "openness must lie in [0, 1]");
    }
    for (int level :
         {e->pupil_level, e->iris_level, e->sclera_level, e->lid_level, e->brow_level}) {
      if (level < 0 || level > 255)
        throw Error(ErrorCode::InvalidArgument, "gray level out of range");
    }
    if (e->center_row < 40 || e->center_row > kSize - 40 || e->center_col < 40 ||
        e->center_col > kSize - 40) {
      throw Error(ErrorCode::InvalidArgument, "eye geometry outside the face");
    }
  }
  if (spec.skin_level < 0 || spec.skin_level > 255) {
    throw Error(ErrorCode::InvalidArgument, "skin level out of range");
  }

  const EyeRaster left{spec.left};
  const EyeRaster right{spec.right};
  std::vector<std::uint8_t> px(static_cast<std::size_t>(kSize) * kSize);
  const double mid = (kSize - 1) / 2.0;
  for (int r = 0; r < kSize; ++r) {
    for (int c = 0; c < kSize; ++c) {
      int v = c < kSize / 2 ? left.sample(r, c) : right.sample(r, c);
      if (v < 0) v = spec.skin_level;
      const double gain = std::max(0.05, 1.0 + spec.shading_horizontal * (c - mid) / mid +
                                             spec.shading_vertical * (r - mid) / mid);
      px[static_cast<std::size_t>(r) * kSize + c] =
          static_cast<std::uint8_t>(std::clamp<long>(std::lround(v * gain), 0, 255));
    }
  }
  GrayImage img =
      add_gaussian_noise(GrayImage(kSize, kSize, std::move(px)), spec.noise_sigma, seed);
  Annotation ann{id,
                 img.bounds(),
                 {spec.left.center_row, spec.left.center_col},
                 {spec.right.center_row, spec.right.center_col}};
  return {std::move(img), std::move(ann)};
}

SyntheticFaceSpec random_face_spec(const VariationRanges& ranges, std::uint64_t seed,
                                   bool lateral) {
  std::mt19937_64 rng(seed);
  const auto uni = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const auto level = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  SyntheticFaceSpec f;
  f.skin_level = level(198, 214);
  SyntheticEyeSpec base;
  base.pupil_radius = uni(3.0, 4.5);
  base.iris_radius = uni(8.0, 10.0);
  base.eye_half_width = uni(16.0, 20.0);
  base.eye_half_height = uni(9.0, 11.0);
  base.openness = uni(ranges.openness_min, ranges.openness_max);
  base.pupil_level = level(10, 35);
  base.iris_level = level(60, 110);
  base.sclera_level = level(226, 240);
  base.lid_level = level(50, 90);
  base.brow_offset = uni(23.0, 29.0);
  base.brow_half_width = uni(21.0, 26.0);
  base.brow_thickness = uni(4.0, 7.0);
  base.brow_level = level(50, 100);

  const double row = 112.0 + uni(-ranges.center_jitter_row, ranges.center_jitter_row);
  f.left = base;
  f.right = base;
  f.left.center_row = row + uni(-1.5, 1.5);
  f.right.center_row = row + uni(-1.5, 1.5);
  f.left.center_col = 93.0 + uni(-ranges.center_jitter_col, ranges.center_jitter_col);
  f.right.center_col = 207.0 + uni(-ranges.center_jitter_col, ranges.center_jitter_col);
  f.right.openness = std::clamp(base.openness + uni(-0.05, 0.05), 0.0, 1.0);

  if (lateral) {
    const double slope = uni(ranges.lateral_shading_min, ranges.lateral_shading_max);
    f.shading_horizontal = uni(0.0, 1.0) < 0.5 ? -slope : slope;
  } else {
    f.shading_horizontal = uni(-ranges.frontal_shading_max, ranges.frontal_shading_max);
  }
  f.shading_vertical = uni(-0.1, 0.1);
  f.noise_sigma = uni(ranges.noise_min, ranges.noise_max);
  return f;
}

std::vector<SyntheticFace> synth_corpus(const CorpusSpec& spec) {
  if (spec.n_faces < 1) throw Error(ErrorCode::InvalidArgument, "n_faces must be >= 1");
  std::vector<SyntheticFace> faces(static_cast<std::size_t>(spec.n_faces));
  LoopErrors errors;
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < spec.n_faces; ++k) {
    errors.capture(k, [&] {
      const std::uint64_t face_seed =
          splitmix64(spec.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(k));
      bool lateral = spec.mix == ShadingMix::LateralOnly;
      if (spec.mix == ShadingMix::Mixed) {
        std::mt19937_64 coin(splitmix64(face_seed));
        lateral =
            std::uniform_real_distribution<double>(0.0, 1.0)(coin) < spec.ranges.lateral_fraction;
      }
      char id[64];
      std::snprintf(id, sizeof id, "%s%04d", spec.id_prefix.c_str(), k);
      auto [img, ann] = synth_face(random_face_spec(spec.ranges, face_seed, lateral),
                                   splitmix64(face_seed + 1), id);
      faces[static_cast<std::size_t>(k)] = {std::move(img), std::move(ann), lateral};
    });
  }
  errors.rethrow();
  return faces;
}

std::vector<PatchSample> extract_samples(std::span<const LabeledImage> data, Head head,
                                         int background_per_eye, std::uint64_t seed,
                                         const Config& cfg) {
  std::vector<std::vector<PatchSample>> per_face(data.size());
  const auto n = static_cast<std::ptrdiff_t>(data.size());
  LoopErrors errors;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    errors.capture(k, [&] {
      const LabeledImage& d = data[static_cast<std::size_t>(k)];
      const std::uint64_t s = splitmix64(seed ^ (0xa5a5a5a5ULL + static_cast<std::uint64_t>(k)));
      auto samples = extract_patches(*d.image, *d.annotation, head, s, cfg);
      auto background =
          extract_background_patches(*d.image, *d.annotation, head, background_per_eye, s + 1, cfg);
      std::move(background.begin(), background.end(), std::back_inserter(samples));
      per_face[static_cast<std::size_t>(k)] = std::move(samples);
    });
  }
  errors.rethrow();
  std::vector<PatchSample> out;
  for (auto& v : per_face) std::move(v.begin(), v.end(), std::back_inserter(out));
  return out;
}

Corpus build_corpus(const CorpusSpec& spec, Head head, const Config& cfg) {
  Corpus corpus;
  corpus.faces = synth_corpus(spec);
  std::vector<LabeledImage> data;
  data.reserve(corpus.faces.size());
  for (const auto& f : corpus.faces) data.push_back({&f.image, &f.annotation});
  corpus.samples = extract_samples(data, head, spec.background_per_eye, spec.seed, cfg);
  return corpus;
}

TrainingSet to_training_set(const std::vector<PatchSample>& samples, Head head) {
  TrainingSet set;
  set.head = head;
  set.features.reserve(samples.size());
  set.targets.reserve(samples.size());
  for (const PatchSample& s : samples) {
    set.features.push_back(s.feature);
    set.targets.push_back(s.target);
  }
  return set;
}

std::pair<GrayImage, Annotation> embed_face(const GrayImage& face, const Annotation& ann,
                                            int canvas_w, int canvas_h, const Rect& face_rect,
                                            std::uint8_t background) {
  GrayImage canvas(canvas_w, canvas_h, background);
  if (!face_rect.valid() || !canvas.bounds().contains(face_rect)) {
    throw Error(ErrorCode::OutOfBounds, "face rectangle outside the canvas");
  }
  const GrayImage scaled = resize_bilinear(face, face_rect.width(), face_rect.height());
  for (int r = 0; r < scaled.height(); ++r) {
    for (int c = 0; c < scaled.width(); ++c) {
      canvas.at(face_rect.row_min + r, face_rect.col_min + c) = scaled.at(r, c);
    }
  }
  const double sy = static_cast<double>(face_rect.height()) / face.height();
  const double sx = static_cast<double>(face_rect.width()) / face.width();
  const auto map = [&](const Point& p) {
    return Point{face_rect.row_min + (p.row + 0.5) * sy - 0.5,
                 face_rect.col_min + (p.col + 0.5) * sx - 0.5};
  };
  Annotation out = ann;
  out.face_rect = face_rect;
  out.left_eye = map(ann.left_eye);
  out.right_eye = map(ann.right_eye);
  return {std::move(canvas), std::move(out)};
}

}  // namespace zep
