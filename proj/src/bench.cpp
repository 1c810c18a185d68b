#include "zep/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "zep/dataset.hpp"
#include "zep/encoder.hpp"
#include "zep/eval.hpp"
#include "zep/localizer.hpp"
#include "zep/projections.hpp"

namespace zep {

StageTiming summarize(const std::string& stage, std::vector<double> samples_ms) {
  StageTiming t{stage, 0.0, 0.0};
  if (samples_ms.empty()) return t;
  t.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) /
              static_cast<double>(samples_ms.size());
  if (samples_ms.size() == 1) {
    t.p95_ms = t.mean_ms;
    return t;
  }
  std::sort(samples_ms.begin(), samples_ms.end());
  const auto rank =
      static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(samples_ms.size())));
  t.p95_ms = samples_ms[std::max<std::size_t>(rank, 1) - 1];
  return t;
}

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
std::vector<double> time_runs(int warmup, int iterations, F&& f) {
  for (int k = 0; k < warmup; ++k) f();
  std::vector<double> ms;
  ms.reserve(static_cast<std::size_t>(iterations));
  for (int k = 0; k < iterations; ++k) {
    const auto t0 = Clock::now();
    f();
    ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  return ms;
}

// Keeps results observable so the timed work is not optimized away.
volatile double g_sink = 0;

}  // namespace

BenchReport run_benchmark(const BenchOptions& opts, const Mlp& frontal_model,
                          const Mlp& lateral_model, const Config& cfg) {
  const int iters = std::max(1, opts.iterations);
  SyntheticFaceSpec spec;
  spec.noise_sigma = 4;
  auto [face300, ann] = synth_face(spec, 7);
  const GrayImage face = resize_bilinear(face300, opts.face_size, opts.face_size);
  const Rect face_rect = face.bounds();
  const int patch = cfg.patch_size;
  const int stride = cfg.scan_stride;

  BenchReport report;
  // Both scans write into a reused buffer so the comparison measures the
  // projection work, not first-touch allocation of the output.
  std::vector<WindowProjections> scanned;
  const auto fast_ms = time_runs(opts.warmup, iters, [&] {
    scan_projections(face, face_rect, patch, patch, stride, scanned);
    g_sink = g_sink + scanned.front().ph.values[0];
  });
  report.stages.push_back(summarize("projection_scan_fast", fast_ms));
  if (opts.include_naive) {
    const auto naive_ms = time_runs(opts.warmup > 0 ? 1 : 0, iters, [&] {
      scan_projections_naive(face, face_rect, patch, patch, stride, scanned);
      g_sink = g_sink + scanned.front().ph.values[0];
    });
    report.stages.push_back(summarize("projection_scan_naive", naive_ms));
    report.scan_speedup = report.stages.back().mean_ms / report.stages.front().mean_ms;
  }

  // Per-stage split of one eye ROI, all candidates, mirroring scan().
  const FaceContext ctx = make_face_context(face, face_rect, cfg);
  const Rect roi = ctx.left_roi;
  std::vector<Rect> windows;
  for (int r = roi.row_min; r <= roi.row_max; r += stride) {
    for (int c = roi.col_min; c <= roi.col_max; c += stride) {
      windows.push_back(patch_window(r, c, patch, ctx.face.width(), ctx.face.height()));
    }
  }
  const Rect region{windows.front().row_min, windows.back().row_max, windows.front().col_min,
                    windows.back().col_max};
  std::vector<WindowProjections> projections;
  report.stages.push_back(
      summarize("roi_projections", time_runs(opts.warmup, iters, [&] {
                  const auto gray = build_oriented_integrals(ctx.face, region);
                  const auto edges = build_oriented_integrals(sobel_energy(ctx.face, region));
                  projections.clear();
                  for (const Rect& w : windows) {
                    projections.push_back({w, fast_projection(gray, w, Axis::Horizontal),
                                           fast_projection(gray, w, Axis::Vertical),
                                           fast_projection(edges, w, Axis::Horizontal),
                                           fast_projection(edges, w, Axis::Vertical)});
                  }
                })));
  std::vector<ZepFeature> features;
  report.stages.push_back(summarize("encoding", time_runs(opts.warmup, iters, [&] {
                                      features.clear();
                                      for (const auto& p : projections)
                                        features.push_back(assemble_zep(p, cfg.encoder));
                                    })));
  const Mlp& model = ctx.illumination == Illumination::Frontal ? frontal_model : lateral_model;
  report.stages.push_back(summarize("mlp", time_runs(opts.warmup, iters, [&] {
                                      double acc = 0;
                                      for (const auto& f : features)
                                        acc += forward(model, f.values);
                                      g_sink = g_sink + acc;
                                    })));
  const ZepImage z = scan(ctx, roi, model, cfg);
  const ModeParams& mode = cfg.mode(ctx.illumination);
  const double shift = response_shift(mode);
  report.stages.push_back(summarize(
      "postprocess", time_runs(opts.warmup, iters, [&] {
        const auto regions = segment_regions(z, shift);
        if (!regions.empty()) {
          const Region chosen = select_region(regions, mode.region_rule, cfg.lower_region_band);
          g_sink = g_sink + eye_center(chosen, z, mode.center_rule, shift).row;
        }
      })));
  const auto full_ms = time_runs(opts.warmup, iters, [&] {
    const FaceResult r = localize_face(face, face_rect, frontal_model, lateral_model, cfg);
    g_sink = g_sink + (r.left ? r.left->center.row : 0.0);
  });
  report.stages.push_back(summarize("localize_face", full_ms));
  report.fps = 1000.0 / report.stages.back().mean_ms;
  report.tp = tp_score(report.fps, opts.frame_w, opts.frame_h, opts.cpu_score);
  return report;
}

void write_bench_csv(const BenchReport& report, std::ostream& out) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "stage,mean_ms,p95_ms\n";
  for (const StageTiming& t : report.stages) {
    out << t.stage << ',' << t.mean_ms << ',' << t.p95_ms << '\n';
  }
  out.precision(2);
  out << "scan_speedup," << report.scan_speedup << '\n'
      << "fps," << report.fps << '\n'
      << "tp_score," << report.tp << '\n';
  out.flags(flags);
  out.precision(prec);
}

}  // namespace zep
