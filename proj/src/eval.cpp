#include "zep/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zep/error.hpp"
#include "zep/parallel.hpp"

namespace zep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LocalizationError make_error(const Point* left, const Point* right, const Annotation& truth) {
  LocalizationError e;
  e.d_eye = distance(truth.left_eye, truth.right_eye);
  if (!(e.d_eye > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, truth.id + ": ground-truth eyes coincide");
  }
  e.eps_left = left ? distance(*left, truth.left_eye) : kInf;
  e.eps_right = right ? distance(*right, truth.right_eye) : kInf;
  e.eps = std::max(e.eps_left, e.eps_right) / e.d_eye;
  return e;
}

}  // namespace

double LocalizationError::best() const { return std::min(eps_left, eps_right) / d_eye; }

double LocalizationError::average() const { return 0.5 * (eps_left + eps_right) / d_eye; }

LocalizationError stringent_error(const EyePair& found, const Annotation& truth) {
  return make_error(&found.left, &found.right, truth);
}

LocalizationError stringent_error(const FaceResult& found, const Annotation& truth) {
  return make_error(found.left ? &found.left->center : nullptr,
                    found.right ? &found.right->center : nullptr, truth);
}

AccuracyCurve accuracy_curve(std::span<const LocalizationError> errors,
                             std::span<const double> thresholds) {
  if (errors.empty()) throw Error(ErrorCode::InvalidArgument, "accuracy curve of no images");
  AccuracyCurve curve;
  curve.thresholds.assign(thresholds.begin(), thresholds.end());
  std::sort(curve.thresholds.begin(), curve.thresholds.end());
  const double n = static_cast<double>(errors.size());
  for (double t : curve.thresholds) {
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "thresholds must be positive");
    std::size_t worst = 0, avg = 0, best = 0;
    for (const LocalizationError& e : errors) {
      worst += e.eps < t;
      avg += e.average() < t;
      best += e.best() < t;
    }
    curve.min_curve.push_back(static_cast<double>(worst) / n);
    curve.avg_curve.push_back(static_cast<double>(avg) / n);
    curve.max_curve.push_back(static_cast<double>(best) / n);
  }
  return curve;
}

double accuracy_at(std::span<const LocalizationError> errors, double threshold) {
  const double t[] = {threshold};
  return accuracy_curve(errors, t).min_curve.front();
}

Evaluation evaluate(std::span<const LabeledImage> data, const Mlp& frontal_model,
                    const Mlp& lateral_model, const Config& cfg) {
  Evaluation ev;
  ev.results.resize(data.size());
  ev.errors.resize(data.size());
  const auto n = static_cast<std::ptrdiff_t>(data.size());
  LoopErrors errors;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    errors.capture(k, [&] {
      const auto i = static_cast<std::size_t>(k);
      const LabeledImage& item = data[i];
      ev.results[i] =
          localize_face(*item.image, item.annotation->face_rect, frontal_model, lateral_model, cfg);
      ev.errors[i] = stringent_error(ev.results[i], *item.annotation);
    });
  }
  errors.rethrow();
  return ev;
}

std::vector<NoiseSweepRow> noise_sweep(std::span<const LabeledImage> data, const Mlp& frontal_model,
                                       const Mlp& lateral_model, std::span<const double> sigmas,
                                       std::uint64_t seed, const Config& cfg) {
  std::vector<NoiseSweepRow> rows;
  for (double sigma : sigmas) {
    std::vector<GrayImage> noisy(data.size());
    const auto n = static_cast<std::ptrdiff_t>(data.size());
    LoopErrors errors;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      errors.capture(k, [&] {
        const auto i = static_cast<std::size_t>(k);
        noisy[i] = add_gaussian_noise(*data[i].image, sigma, seed + 7919ULL * i);
      });
    }
    errors.rethrow();
    std::vector<LabeledImage> degraded(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) degraded[i] = {&noisy[i], data[i].annotation};
    const Evaluation ev = evaluate(degraded, frontal_model, lateral_model, cfg);
    rows.push_back({sigma, accuracy_at(ev.errors, kIrisThreshold)});
  }
  return rows;
}

double tp_score(double fps, double frame_w, double frame_h, double cpu_score) {
  if (!(fps > 0.0) || !(frame_w > 0.0) || !(frame_h > 0.0) || !(cpu_score > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tp_score inputs must be positive");
  }
  return fps * std::min(frame_w, frame_h) / cpu_score;
}

}  // namespace zep
