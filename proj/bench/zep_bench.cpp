// Naive vs integral-image projection scan, serial vs OpenMP, plus the
// per-stage localization timings.
//
//   zep_bench [iterations] [face_size]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "zep/bench.hpp"
#include "zep/dataset.hpp"
#include "zep/encoder.hpp"
#include "zep/parallel.hpp"
#include "zep/projections.hpp"

using namespace zep;

namespace {

template <class F>
double mean_ms(int iterations, F&& f) {
  f();  // warm
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < iterations; ++k) f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() /
         iterations;
}

}  // namespace

int main(int argc, char** argv) {
  const int iterations = argc > 1 ? std::max(1, std::atoi(argv[1])) : 100;
  const int face_size = argc > 2 ? std::atoi(argv[2]) : 300;
  const Config cfg;

  SyntheticFaceSpec spec;
  spec.noise_sigma = 4;
  const GrayImage face = resize_bilinear(synth_face(spec, 7).first, face_size, face_size);
  const Rect all = face.bounds();
  const int p = cfg.patch_size;
  const int s = cfg.scan_stride;
  std::vector<WindowProjections> out;

  const int threads = max_threads();
  set_num_threads(1);
  const double fast_serial =
      mean_ms(iterations, [&] { scan_projections(face, all, p, p, s, out); });
  set_num_threads(threads);
  const double fast_omp = mean_ms(iterations, [&] { scan_projections(face, all, p, p, s, out); });
  const int naive_iters = std::max(1, iterations / 10);
  const double naive =
      mean_ms(naive_iters, [&] { scan_projections_naive(face, all, p, p, s, out); });

  std::printf("# %dx%d face, %dx%d window, stride %d, %zu windows, %d threads\n", face_size,
              face_size, p, p, s, out.size(), threads);
  std::printf("kernel,mean_ms,speedup_vs_naive\n");
  std::printf("scan_naive_serial,%.3f,1.00\n", naive);
  std::printf("scan_fast_serial,%.3f,%.2f\n", fast_serial, naive / fast_serial);
  std::printf("scan_fast_openmp,%.3f,%.2f\n", fast_omp, naive / fast_omp);

  BenchOptions opts;
  opts.face_size = face_size;
  opts.iterations = iterations;
  opts.include_naive = false;
  const int n_in = static_cast<int>(zep_length(cfg.encoder));
  const Mlp fm = mlp_new(n_in, cfg.hidden_width(), 1, Head::Regression, 1);
  const Mlp lm = mlp_new(n_in, cfg.hidden_width(), 1, Head::Binary, 2);
  std::printf("\n");
  write_bench_csv(run_benchmark(opts, fm, lm, cfg), std::cout);
  return 0;
}
