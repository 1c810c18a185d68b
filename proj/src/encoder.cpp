#include "zep/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "zep/error.hpp"

namespace zep {

NormalizedProjection normalize_projection(const Projection& p) {
  if (p.sums.empty()) throw Error(ErrorCode::InvalidArgument, "empty projection");
  const auto n = static_cast<std::int64_t>(p.sums.size());
  std::int64_t total = 0;
  for (auto s : p.sums) total += s;

  // n * (v_j - mean) * divisor, an exact integer.
  std::vector<std::int64_t> dev(p.sums.size());
  std::int64_t max_dev = 0;
  for (std::size_t j = 0; j < dev.size(); ++j) {
    dev[j] = n * p.sums[j] - total;
    max_dev = std::max(max_dev, std::abs(dev[j]));
  }

  NormalizedProjection out;
  out.values.assign(dev.size(), 0.0);
  if (max_dev == 0) return out;
  const double denom = static_cast<double>(max_dev);
  for (std::size_t j = 0; j < dev.size(); ++j) {
    out.values[j] = static_cast<double>(127 * dev[j]) / denom;
  }
  return out;
}

NormalizedProjection normalize_projection(std::span<const double> signal) {
  if (signal.empty()) throw Error(ErrorCode::InvalidArgument, "empty projection");
  double mean = 0.0;
  for (double v : signal) mean += v;
  mean /= static_cast<double>(signal.size());
  double max_dev = 0.0;
  for (double v : signal) max_dev = std::max(max_dev, std::abs(v - mean));

  NormalizedProjection out;
  out.values.assign(signal.size(), 0.0);
  if (!(max_dev > 0.0)) return out;
  for (std::size_t j = 0; j < signal.size(); ++j) {
    out.values[j] = std::clamp(kNormalizedPeak * (signal[j] - mean) / max_dev, -kNormalizedPeak,
                               kNormalizedPeak);
  }
  return out;
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

std::vector<Epoch> extract_epochs(std::span<const double> signal, EpochScanStats* stats) {
  std::vector<Epoch> epochs;
  // Extremes are found on the plateau-compressed signal: a plateau is an
  // extreme when both neighbouring plateaus lie on the same side of it. The
  // decision for a plateau is only known once the next distinct value shows
  // up, possibly after its epoch has closed, so it is credited by index.
  struct Plateau {
    double value = 0;
    long epoch = -1;  // -1 for zero plateaus
    bool has_prev = false;
    double prev = 0;
  };
  Plateau cur;
  bool have_plateau = false;
  int cur_sign = 0;
  std::vector<double> lo_mode, hi_mode;

  auto close_plateau = [&](double next) {
    if (!have_plateau || cur.epoch < 0 || !cur.has_prev) return;
    const bool is_max = cur.value > cur.prev && cur.value > next;
    const bool is_min = cur.value < cur.prev && cur.value < next;
    if (!is_max && !is_min) return;
    const auto e = static_cast<std::size_t>(cur.epoch);
    ++epochs[e].shape;
    const double mag = std::abs(cur.value);
    lo_mode[e] = std::min(lo_mode[e], mag);
    hi_mode[e] = std::max(hi_mode[e], mag);
  };

  for (std::size_t k = 0; k < signal.size(); ++k) {
    const double x = signal[k];
    if (stats) ++stats->visits;
    const int s = sign_of(x);

    if (s == 0) {
      cur_sign = 0;
    } else if (s != cur_sign) {
      cur_sign = s;
      epochs.push_back({static_cast<int>(k), 0, x, 0, 0.0});
      lo_mode.push_back(std::numeric_limits<double>::infinity());
      hi_mode.push_back(0.0);
    }
    if (s != 0) {
      Epoch& e = epochs.back();
      ++e.duration;
      if (std::abs(x) > std::abs(e.amplitude)) e.amplitude = x;
    }

    if (!have_plateau) {
      cur = {x, s == 0 ? -1 : static_cast<long>(epochs.size()) - 1, false, 0.0};
      have_plateau = true;
    } else if (x != cur.value) {
      close_plateau(x);
      cur = {x, s == 0 ? -1 : static_cast<long>(epochs.size()) - 1, true, cur.value};
    }
  }

  for (std::size_t e = 0; e < epochs.size(); ++e) {
    if (epochs[e].shape == 0) {
      // Monotone run against the signal boundary: its peak is the only mode.
      epochs[e].shape = 1;
      epochs[e].mode_range = 0.0;
    } else {
      epochs[e].mode_range = hi_mode[e] - lo_mode[e];
    }
  }
  return epochs;
}

std::vector<EncodedEpoch> normalize_epoch_params(std::span<const Epoch> epochs, int signal_len,
                                                 int shape_cap) {
  if (signal_len < 1) throw Error(ErrorCode::InvalidArgument, "signal_len must be >= 1");
  if (shape_cap < 1) throw Error(ErrorCode::InvalidArgument, "shape_cap must be >= 1");
  std::vector<EncodedEpoch> out;
  out.reserve(epochs.size());
  const double len = static_cast<double>(signal_len);
  const double cap = static_cast<double>(shape_cap);
  for (const Epoch& e : epochs) {
    out.push_back({static_cast<double>(e.duration) / len, e.amplitude / kAmplitudeScale,
                   static_cast<double>(std::min(e.shape, shape_cap)) / cap});
  }
  return out;
}

ZepFeature assemble_zep(const Projection& ph, const Projection& pv, const Projection& eh,
                        const Projection& ev, const EncoderConfig& cfg) {
  if (cfg.max_epochs < 1) throw Error(ErrorCode::InvalidArgument, "max_epochs must be >= 1");
  ZepFeature f;
  f.values.assign(zep_length(cfg), 0.0);
  std::size_t base = 0;
  for (const Projection* p : {&ph, &pv, &eh, &ev}) {
    const NormalizedProjection norm = normalize_projection(*p);
    auto epochs = extract_epochs(norm);
    if (epochs.size() > static_cast<std::size_t>(cfg.max_epochs)) {
      epochs.resize(static_cast<std::size_t>(cfg.max_epochs));
    }
    const auto encoded = normalize_epoch_params(epochs, static_cast<int>(p->size()), cfg.shape_cap);
    for (std::size_t e = 0; e < encoded.size(); ++e) {
      double* slot = f.values.data() + base + 3 * e;
      slot[0] = encoded[e].duration;
      slot[1] = encoded[e].amplitude;
      slot[2] = cfg.shape_parameter == ShapeParameter::ExtremeCount
                    ? encoded[e].shape
                    : epochs[e].mode_range / kAmplitudeScale;
    }
    base += static_cast<std::size_t>(3 * cfg.max_epochs);
  }
  return f;
}

ZepFeature zep_of_patch(const GrayImage& patch, const EncoderConfig& cfg) {
  const Rect all = patch.bounds();
  const SobelEnergy energy = sobel_energy(patch);
  return assemble_zep(integral_projection_naive(patch, all, Axis::Horizontal),
                      integral_projection_naive(patch, all, Axis::Vertical),
                      edge_projection_naive(energy, all, Axis::Horizontal),
                      edge_projection_naive(energy, all, Axis::Vertical), cfg);
}

}  // namespace zep
