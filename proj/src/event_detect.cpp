#include "trem/event_detect.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trem/errors.h"

namespace trem {

ThresholdMode threshold_mode_from_name(std::string_view name) {
  if (name == "fixed") return ThresholdMode::fixed;
  if (name == "median_mad") return ThresholdMode::median_mad;
  throw InvalidArgument("unknown threshold mode '" + std::string(name) +
                        "' (expected fixed or median_mad)");
}

std::string_view threshold_mode_name(ThresholdMode mode) {
  return mode == ThresholdMode::fixed ? "fixed" : "median_mad";
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (n % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

}  // namespace

DetectionTrace gate(const DetectionTrace& trace, const GateConfig& cfg,
                    std::span<const double> frame_rms) {
  if (trace.values.empty()) throw InvalidArgument("gate: empty trace");
  if (cfg.start_trim_s < 0.0 || cfg.end_trim_s < 0.0) {
    throw InvalidArgument("gate: trims must be non-negative");
  }
  if (!frame_rms.empty() && frame_rms.size() != trace.size()) {
    throw InvalidArgument("gate: frame_rms length does not match trace");
  }

  const double t_front = trace.timestamps.front();
  const double t_back = trace.timestamps.back();
  std::size_t lo = 0;
  std::size_t hi = trace.size();  // exclusive
  while (lo < hi && trace.timestamps[lo] - t_front < cfg.start_trim_s) ++lo;
  while (hi > lo && t_back - trace.timestamps[hi - 1] < cfg.end_trim_s) --hi;

  if (cfg.rms_floor > 0.0 && !frame_rms.empty()) {
    while (lo < hi && frame_rms[lo] < cfg.rms_floor) ++lo;
    while (hi > lo && frame_rms[hi - 1] < cfg.rms_floor) --hi;
  }
  if (lo >= hi) throw Error("gate: nothing left after trimming");

  DetectionTrace out;
  out.values.assign(trace.values.begin() + static_cast<std::ptrdiff_t>(lo),
                    trace.values.begin() + static_cast<std::ptrdiff_t>(hi));
  out.timestamps.assign(trace.timestamps.begin() + static_cast<std::ptrdiff_t>(lo),
                        trace.timestamps.begin() + static_cast<std::ptrdiff_t>(hi));
  out.feature_rate = trace.feature_rate;
  out.feature_name = trace.feature_name;
  out.normalized = trace.normalized;
  out.degenerate = trace.degenerate;
  return out;
}

DetectionTrace normalize_trace(const DetectionTrace& trace) {
  if (trace.values.empty()) throw InvalidArgument("normalize_trace: empty trace");
  DetectionTrace out = trace;

  const double mean = std::accumulate(trace.values.begin(), trace.values.end(), 0.0) /
                      static_cast<double>(trace.size());
  double max_dev = 0.0;
  for (double v : trace.values) max_dev = std::max(max_dev, std::abs(v - mean));

  if (max_dev < 1e-15) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.degenerate = true;
  } else {
    for (double& v : out.values) v = (v - mean) / max_dev;
  }
  out.normalized = true;
  return out;
}

DetectionTrace detection_function(const DetectionTrace& trace) {
  if (trace.size() < 3) throw InvalidArgument("detection_function: need at least 3 samples");
  DetectionTrace out = trace;
  out.normalized = false;
  out.values[0] = 0.0;
  for (std::size_t t = trace.size() - 1; t >= 1; --t) {
    out.values[t] = std::max(trace.values[t] - trace.values[t - 1], 0.0);
  }
  return out;
}

EventList pick_peaks(const DetectionTrace& df, const PeakConfig& cfg) {
  EventList events;
  const std::size_t n = df.size();
  if (n < 3) return events;
  if (!(df.feature_rate > 0.0)) throw InvalidArgument("pick_peaks: trace needs a feature rate");
  if (cfg.min_spacing_s < 2.0 / df.feature_rate) {
    throw InvalidArgument("pick_peaks: min_spacing_s must be >= 2 / feature_rate");
  }

  // Per-sample threshold.
  std::vector<double> threshold(n, cfg.fixed);
  if (cfg.mode == ThresholdMode::median_mad) {
    const std::size_t half =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.window_s * df.feature_rate / 2.0)));
    std::vector<double> window;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t lo = t >= half ? t - half : 0;
      const std::size_t hi = std::min(n, t + half + 1);
      window.assign(df.values.begin() + static_cast<std::ptrdiff_t>(lo),
                    df.values.begin() + static_cast<std::ptrdiff_t>(hi));
      const double med = median_of(window);
      for (double& v : window) v = std::abs(v - med);
      const double mad = median_of(window);
      threshold[t] = med + cfg.k * mad;
    }
  }

  // Candidate local maxima strictly above threshold; rising edge wins on
  // plateaus.
  std::vector<std::size_t> candidates;
  for (std::size_t t = 1; t + 1 < n; ++t) {
    if (df.values[t] > df.values[t - 1] && df.values[t] >= df.values[t + 1] &&
        df.values[t] > threshold[t]) {
      candidates.push_back(t);
    }
  }

  // Largest-first greedy spacing filter.
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (df.values[a] != df.values[b]) return df.values[a] > df.values[b];
    return a < b;
  });
  std::vector<std::size_t> accepted;
  for (std::size_t t : candidates) {
    const bool clashes = std::any_of(accepted.begin(), accepted.end(), [&](std::size_t s) {
      return std::abs(df.timestamps[t] - df.timestamps[s]) < cfg.min_spacing_s;
    });
    if (!clashes) accepted.push_back(t);
  }
  std::sort(accepted.begin(), accepted.end());

  for (std::size_t t : accepted) {
    events.onsets.push_back(df.timestamps[t]);
    events.peak_values.push_back(df.values[t]);
  }
  return events;
}

IoiStats inter_onset_intervals(const EventList& events) {
  if (events.onsets.size() < 2) {
    throw InvalidArgument("inter_onset_intervals: need at least 2 onsets");
  }
  IoiStats stats;
  stats.intervals.resize(events.onsets.size() - 1);
  for (std::size_t i = 1; i < events.onsets.size(); ++i) {
    stats.intervals[i - 1] = events.onsets[i] - events.onsets[i - 1];
  }
  stats.mean = std::accumulate(stats.intervals.begin(), stats.intervals.end(), 0.0) /
               static_cast<double>(stats.intervals.size());
  double var = 0.0;
  for (double d : stats.intervals) var += (d - stats.mean) * (d - stats.mean);
  stats.stdev = std::sqrt(var / static_cast<double>(stats.intervals.size()));
  stats.rate_hz = stats.mean > 0.0 ? 1.0 / stats.mean : 0.0;
  return stats;
}

ControlBuffer export_control(const DetectionTrace& trace) {
  if (!trace.normalized) throw InvalidArgument("export_control: trace must be normalized");
  if (!(trace.feature_rate > 0.0)) throw InvalidArgument("export_control: trace needs a feature rate");
  ControlBuffer cb;
  cb.entries.resize(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    cb.entries[i] = {i, static_cast<double>(i) / trace.feature_rate, trace.values[i]};
  }
  return cb;
}

}  // namespace trem
