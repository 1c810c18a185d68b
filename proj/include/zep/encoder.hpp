#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zep/image.hpp"
#include "zep/projections.hpp"

namespace zep {

/// One zero-crossing interval of a centered signal.
struct Epoch {
  int start = 0;          // index of the first sample
  int duration = 0;       // samples in the run
  double amplitude = 0;   // signed sample of largest magnitude
  int shape = 0;          // local extremes inside the run, at least 1
  double mode_range = 0;  // |highest mode| - |lowest mode| among the extremes

  friend bool operator==(const Epoch&, const Epoch&) = default;
};

/// Centered, symmetric-range projection: values within [-127, 127].
struct NormalizedProjection {
  std::vector<double> values;
};

/// What fills the third slot of each encoded epoch.
enum class ShapeParameter {
  ExtremeCount,  // number of local extremes (default)
  ModeRange,     // spread between the highest and lowest mode of the epoch
};

struct EncoderConfig {
  int max_epochs = 5;
  int shape_cap = 7;
  ShapeParameter shape_parameter = ShapeParameter::ExtremeCount;
};

/// Flat (P_H, P_V, E_H, E_V) x epoch x (duration, amplitude, shape) vector.
struct ZepFeature {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const ZepFeature&, const ZepFeature&) = default;
};

inline constexpr double kNormalizedPeak = 127.0;
inline constexpr double kAmplitudeScale = 128.0;

/// Mean-centers and scales so the largest deviation maps to +-127. Exact:
/// works on the integer sums, so p and p + c (or p's stretched copy) give
/// bit-identical results.
NormalizedProjection normalize_projection(const Projection& p);
/// Same rule for an arbitrary real signal (CSV input).
NormalizedProjection normalize_projection(std::span<const double> signal);

struct EpochScanStats {
  std::size_t visits = 0;
};

/// Single left-to-right pass. Exact zeros separate epochs and belong to none.
std::vector<Epoch> extract_epochs(std::span<const double> signal, EpochScanStats* stats = nullptr);
inline std::vector<Epoch> extract_epochs(const NormalizedProjection& p,
                                         EpochScanStats* stats = nullptr) {
  return extract_epochs(p.values, stats);
}

struct EncodedEpoch {
  double duration = 0;
  double amplitude = 0;
  double shape = 0;
};

std::vector<EncodedEpoch> normalize_epoch_params(std::span<const Epoch> epochs, int signal_len,
                                                 int shape_cap = 7);

/// Normalize, encode, keep the first max_epochs per projection (zero-padded),
/// concatenate in (P_H, P_V, E_H, E_V) order.
ZepFeature assemble_zep(const Projection& ph, const Projection& pv, const Projection& eh,
                        const Projection& ev, const EncoderConfig& cfg = {});
inline ZepFeature assemble_zep(const WindowProjections& w, const EncoderConfig& cfg = {}) {
  return assemble_zep(w.ph, w.pv, w.eh, w.ev, cfg);
}

/// ZEP of a whole standalone patch (Sobel border zeroed at the patch edge).
ZepFeature zep_of_patch(const GrayImage& patch, const EncoderConfig& cfg = {});

inline std::size_t zep_length(const EncoderConfig& cfg) {
  return static_cast<std::size_t>(4 * cfg.max_epochs * 3);
}

}  // namespace zep
