#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trem {

/// A feature trajectory sampled at the feature rate (sample_rate / hop).
/// When `normalized` is set the series has mean 0 and max |value| 1,
/// unless `degenerate` marks an all-zero trace.
struct DetectionTrace {
  std::vector<double> values;
  std::vector<double> timestamps;  // seconds, absolute
  double feature_rate = 0.0;       // Hz
  std::string feature_name;
  bool normalized = false;
  bool degenerate = false;

  std::size_t size() const { return values.size(); }
  double duration_s() const {
    return values.empty() ? 0.0 : timestamps.back() - timestamps.front();
  }
};

struct GateConfig {
  double start_trim_s = 0.25;
  double end_trim_s = 0.25;
  double rms_floor = 0.0;  // 0 disables the RMS gate
};

/// Detected onsets, strictly increasing, spaced >= the min_spacing used to
/// pick them.
struct EventList {
  std::vector<double> onsets;       // seconds
  std::vector<double> peak_values;  // detection-function value at each onset
};

struct IoiStats {
  std::vector<double> intervals;  // seconds, consecutive differences
  double mean = 0.0;
  double stdev = 0.0;  // population
  double rate_hz = 0.0;
};

struct ControlEntry {
  std::size_t index = 0;
  double time_s = 0.0;
  double value = 0.0;  // [-1, 1]
};

/// Normalized trajectory re-indexed from zero, exportable as a
/// transposition-control signal.
struct ControlBuffer {
  std::vector<ControlEntry> entries;
};

enum class ThresholdMode { fixed, median_mad };

ThresholdMode threshold_mode_from_name(std::string_view name);  // throws InvalidArgument
std::string_view threshold_mode_name(ThresholdMode mode);

struct PeakConfig {
  ThresholdMode mode = ThresholdMode::median_mad;
  double k = 1.0;           // MAD multiplier for median_mad
  double fixed = 0.1;       // threshold for fixed mode
  double window_s = 1.0;    // sliding window for the adaptive threshold
  double min_spacing_s = 0.06;
};

/// Trims start_trim_s / end_trim_s off the trace, then drops leading and
/// trailing frames whose companion RMS is below rms_floor. `frame_rms`,
/// when non-empty, must align one-to-one with the trace. Throws Error if
/// nothing remains.
DetectionTrace gate(const DetectionTrace& trace, const GateConfig& cfg,
                    std::span<const double> frame_rms = {});

/// Zero-centers and scales to max |value| = 1. Constant traces become
/// all-zero and are flagged degenerate.
DetectionTrace normalize_trace(const DetectionTrace& trace);

/// Half-wave-rectified first difference: d[0] = 0,
/// d[t] = max(v[t] - v[t-1], 0). Requires >= 3 samples.
DetectionTrace detection_function(const DetectionTrace& trace);

/// Picks local maxima strictly above the threshold; within any min_spacing
/// window only the largest survives. The adaptive threshold is a sliding
/// median + k * MAD. Requires min_spacing_s >= 2 / feature_rate.
EventList pick_peaks(const DetectionTrace& df, const PeakConfig& cfg);

/// Consecutive onset differences with mean/stdev and rate_hz = 1 / mean.
/// Throws InvalidArgument with fewer than 2 onsets.
IoiStats inter_onset_intervals(const EventList& events);

/// One entry per frame at times index / feature_rate. Requires a
/// normalized trace.
ControlBuffer export_control(const DetectionTrace& trace);

}  // namespace trem
