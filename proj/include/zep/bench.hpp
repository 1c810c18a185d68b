#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "zep/config.hpp"
#include "zep/mlp.hpp"

namespace zep {

struct StageTiming {
  std::string stage;
  double mean_ms = 0;
  double p95_ms = 0;
};

StageTiming summarize(const std::string& stage, std::vector<double> samples_ms);

struct BenchOptions {
  int face_size = 300;
  int iterations = 100;
  int warmup = 3;
  bool include_naive = true;  // the per-window reference scan is slow
  double cpu_score = 1747;    // single-thread benchmark score of the host
  double frame_w = 1280;
  double frame_h = 720;
};

struct BenchReport {
  std::vector<StageTiming> stages;
  double scan_speedup = 0;  // naive scan mean / fast scan mean
  double fps = 0;           // from the full localization mean
  double tp = 0;
};

/// Times the localization stages on a synthetic face. Models only need the
/// right heads and widths; their weights do not affect the timing path.
BenchReport run_benchmark(const BenchOptions& opts, const Mlp& frontal_model,
                          const Mlp& lateral_model, const Config& cfg = {});

void write_bench_csv(const BenchReport& report, std::ostream& out);

}  // namespace zep
