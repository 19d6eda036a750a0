#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trem/event_detect.h"
#include "trem/spectrum.h"

#include "json.hpp"

namespace trem {

/// Analysis settings shared by the whole pipeline. Config loading follows
/// flags > config file > defaults; the effective config is echoed into every
/// JSON report.
struct AnalysisConfig {
  // framing / spectrum
  int frame_size = 2048;
  int hop_size = 512;
  Window window = Window::hann;

  // pitch / harmonic model
  double f0_min_hz = 70.0;
  double f0_max_hz = 1200.0;
  double voicing_threshold = 0.5;
  double harmonic_tol = 0.03;  // relative width per harmonic index
  int max_harmonics = 20;
  bool hold_unvoiced = true;   // hold harmonic/perceptual columns over unvoiced frames
  bool tristimulus_squared = false;  // experiment: T ratios on a(h)^2 instead of a(h)

  // trajectory smoothing (feature rate domain)
  bool smooth_enabled = true;
  double smooth_cutoff_hz = 15.0;
  int smooth_order = 2;

  // event detection
  double gate_start_trim_s = 0.25;
  double gate_end_trim_s = 0.25;
  double rms_floor = 0.0;
  ThresholdMode threshold_mode = ThresholdMode::median_mad;
  double threshold_k = 1.0;
  double threshold_fixed = 0.1;
  double min_spacing_s = 0.06;

  // feature selection
  std::vector<std::string> energy_blocklist = {"HarmonicEnergy", "Loudness", "TotalEnergy"};
  std::string selected_feature = "auto";

  double feature_rate(int sample_rate) const {
    return static_cast<double>(sample_rate) / hop_size;
  }

  /// Throws InvalidArgument naming the offending field.
  void validate() const;

  /// Overlays fields present in a flat JSON object onto this config.
  /// Unknown keys are an error.
  void apply_json(const nlohmann::json& j);

  nlohmann::json to_json() const;

  static AnalysisConfig from_json_file(const std::filesystem::path& path);
};

}  // namespace trem
