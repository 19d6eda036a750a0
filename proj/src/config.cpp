#include "trem/config.h"

#include <fstream>

#include "trem/descriptors.h"
#include "trem/errors.h"

namespace trem {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void AnalysisConfig::validate() const {
  if (!is_power_of_two(frame_size) || frame_size < 64) {
    throw InvalidArgument("config: frame_size must be a power of two >= 64");
  }
  if (hop_size < 1 || hop_size > frame_size) {
    throw InvalidArgument("config: hop_size must be in [1, frame_size]");
  }
  if (!(f0_min_hz > 0.0) || !(f0_min_hz < f0_max_hz)) {
    throw InvalidArgument("config: need 0 < f0_min_hz < f0_max_hz");
  }
  if (!(voicing_threshold > 0.0) || !(voicing_threshold < 1.0)) {
    throw InvalidArgument("config: voicing_threshold must be in (0, 1)");
  }
  if (!(harmonic_tol > 0.0) || harmonic_tol > 0.5) {
    throw InvalidArgument("config: harmonic_tol must be in (0, 0.5]");
  }
  if (max_harmonics < 1) throw InvalidArgument("config: max_harmonics must be >= 1");
  if (!(smooth_cutoff_hz > 0.0)) {
    throw InvalidArgument("config: smooth_cutoff_hz must be positive");
  }
  if (smooth_order < 2 || smooth_order % 2 != 0) {
    throw InvalidArgument("config: smooth_order must be an even number >= 2");
  }
  if (gate_start_trim_s < 0.0 || gate_end_trim_s < 0.0) {
    throw InvalidArgument("config: gate trims must be non-negative");
  }
  if (rms_floor < 0.0) throw InvalidArgument("config: rms_floor must be non-negative");
  if (!(threshold_k >= 0.0)) throw InvalidArgument("config: threshold_k must be >= 0");
  if (!(min_spacing_s > 0.0)) throw InvalidArgument("config: min_spacing_s must be positive");
  for (const std::string& name : energy_blocklist) {
    if (feature_index(name) < 0) {
      throw InvalidArgument("config: unknown feature in energy_blocklist: " + name);
    }
  }
  if (selected_feature != "auto" && feature_index(selected_feature) < 0) {
    throw InvalidArgument("config: unknown selected_feature: " + selected_feature);
  }
}

void AnalysisConfig::apply_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config: expected a flat JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "frame_size") {
        frame_size = value.get<int>();
      } else if (key == "hop_size") {
        hop_size = value.get<int>();
      } else if (key == "window") {
        window = window_from_name(value.get<std::string>());
      } else if (key == "f0_min_hz") {
        f0_min_hz = value.get<double>();
      } else if (key == "f0_max_hz") {
        f0_max_hz = value.get<double>();
      } else if (key == "voicing_threshold") {
        voicing_threshold = value.get<double>();
      } else if (key == "harmonic_tol") {
        harmonic_tol = value.get<double>();
      } else if (key == "max_harmonics") {
        max_harmonics = value.get<int>();
      } else if (key == "hold_unvoiced") {
        hold_unvoiced = value.get<bool>();
      } else if (key == "tristimulus_squared") {
        tristimulus_squared = value.get<bool>();
      } else if (key == "smooth_enabled") {
        smooth_enabled = value.get<bool>();
      } else if (key == "smooth_cutoff_hz") {
        smooth_cutoff_hz = value.get<double>();
      } else if (key == "smooth_order") {
        smooth_order = value.get<int>();
      } else if (key == "gate_start_trim_s") {
        gate_start_trim_s = value.get<double>();
      } else if (key == "gate_end_trim_s") {
        gate_end_trim_s = value.get<double>();
      } else if (key == "rms_floor") {
        rms_floor = value.get<double>();
      } else if (key == "threshold_mode") {
        threshold_mode = threshold_mode_from_name(value.get<std::string>());
      } else if (key == "threshold_k") {
        threshold_k = value.get<double>();
      } else if (key == "threshold_fixed") {
        threshold_fixed = value.get<double>();
      } else if (key == "min_spacing_s") {
        min_spacing_s = value.get<double>();
      } else if (key == "energy_blocklist") {
        energy_blocklist = value.get<std::vector<std::string>>();
      } else if (key == "selected_feature") {
        selected_feature = value.get<std::string>();
      } else {
        throw InvalidArgument("config: unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("config: bad value for '" + key + "': " + e.what());
    }
  }
}

nlohmann::json AnalysisConfig::to_json() const {
  return nlohmann::json{
      {"frame_size", frame_size},
      {"hop_size", hop_size},
      {"window", std::string(window_name(window))},
      {"f0_min_hz", f0_min_hz},
      {"f0_max_hz", f0_max_hz},
      {"voicing_threshold", voicing_threshold},
      {"harmonic_tol", harmonic_tol},
      {"max_harmonics", max_harmonics},
      {"hold_unvoiced", hold_unvoiced},
      {"tristimulus_squared", tristimulus_squared},
      {"smooth_enabled", smooth_enabled},
      {"smooth_cutoff_hz", smooth_cutoff_hz},
      {"smooth_order", smooth_order},
      {"gate_start_trim_s", gate_start_trim_s},
      {"gate_end_trim_s", gate_end_trim_s},
      {"rms_floor", rms_floor},
      {"threshold_mode", std::string(threshold_mode_name(threshold_mode))},
      {"threshold_k", threshold_k},
      {"threshold_fixed", threshold_fixed},
      {"min_spacing_s", min_spacing_s},
      {"energy_blocklist", energy_blocklist},
      {"selected_feature", selected_feature},
  };
}

AnalysisConfig AnalysisConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config: invalid JSON in " + path.string() + ": " + e.what());
  }
  AnalysisConfig cfg;
  cfg.apply_json(j);
  return cfg;
}

}  // namespace trem
