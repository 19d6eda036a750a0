#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "trem/audio.h"

#include "json.hpp"

namespace trem {

struct Formant {
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
  double gain = 0.0;
};

struct VowelSpec {
  std::string name;
  std::vector<Formant> formants;
};

/// Built-in design vowels "i", "e", "o" (two-formant tables).
VowelSpec builtin_vowel(std::string_view name);  // throws InvalidArgument

/// Steady-pitch tremolo between two vowels: ground truth for the analysis
/// pipeline. background_db is relative to the voice RMS; -inf disables it.
struct TremoloSpec {
  double f0_hz = 220.0;
  VowelSpec vowel_a;
  VowelSpec vowel_b;
  double rate_hz = 5.0;
  double duration_s = 4.0;
  double background_db = -std::numeric_limits<double>::infinity();
  double pitch_wobble_cents = 20.0;

  /// Throws InvalidArgument naming the offending field.
  void validate(int sample_rate) const;
};

/// Sum of second-order resonance responses at h * f0, floored at -60 dB:
/// gain_f / (1 + ((h*f0 - center) / (bandwidth/2))^2).
double formant_gain(int h, double f0, const VowelSpec& vowel);

/// Additive synthesis of harmonics 1..min(20, below Nyquist) whose gains
/// cross-fade between the two vowels with a raised-cosine modulator at
/// rate_hz; f0 wobbles by pitch_wobble_cents in phase with the modulator.
/// Optional pink background noise is mixed at background_db; output is
/// peak-normalized to 0.9. Deterministic for a given seed.
AudioBuffer synthesize_tremolo(const TremoloSpec& spec, int sample_rate, std::uint64_t seed);

nlohmann::json tremolo_spec_to_json(const TremoloSpec& spec);
TremoloSpec tremolo_spec_from_json(const nlohmann::json& j);  // throws InvalidArgument

}  // namespace trem
