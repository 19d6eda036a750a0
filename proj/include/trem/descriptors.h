#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trem/audio.h"
#include "trem/config.h"
#include "trem/pitch.h"
#include "trem/spectrum.h"

namespace trem {

inline constexpr int kFeatureCount = 52;
inline constexpr int kBarkBandCount = 24;

/// Canonical 52-column name order. Grouped by input representation:
/// spectral (magnitude bins), harmonic (partial amplitudes), perceptual
/// (specific loudness over Bark bands), temporal. Multi-component
/// descriptors are expanded with 1-based suffixes.
const std::array<std::string_view, kFeatureCount>& feature_names();

/// Canonical index of a name, or -1. Matching is case-insensitive so the
/// lowercase spellings used in reports resolve too.
int feature_index(std::string_view name);

/// Bark band edges in Hz (25 edges, 24 bands).
const std::array<double, kBarkBandCount + 1>& bark_band_edges_hz();

/// Bark band centers in Hz (midpoints of the edges above), the positions
/// fed to the perceptual moment/envelope descriptors.
const std::array<double, kBarkBandCount>& bark_band_centers_hz();

// ---------------------------------------------------------------------------
// Per-frame descriptor families
// ---------------------------------------------------------------------------

struct ShapeMoments {
  double centroid = 0.0;
  double spread = 0.0;
  double skewness = 0.0;
  double kurtosis = 3.0;
  bool degenerate = false;
};

/// Standardized probability moments of the distribution p_b = w_b / sum(w)
/// over positions. Zero spread yields skewness 0 / kurtosis 3; all-zero
/// weights additionally set the degenerate flag (centroid/spread 0).
ShapeMoments shape_moments(std::span<const double> weights, std::span<const double> positions);

struct EnvelopeStats {
  double slope = 0.0;      // least-squares slope of w over x, normalized by sum(w)
  double decrease = 0.0;
  double rolloff = 0.0;    // smallest x_c with 95% of sum(w^2) at or below
  double variation = 0.0;  // 1 - normalized cross-correlation with prev frame
  bool degenerate = false;
};

/// prev_weights may be empty (first frame) -> variation 0. When lengths
/// differ the shorter vector is zero-padded for the variation term.
EnvelopeStats envelope_stats(std::span<const double> weights, std::span<const double> positions,
                             std::span<const double> prev_weights);

struct BandFlatnessCrest {
  std::array<double, 4> flatness{};  // geometric / arithmetic mean of bin power
  std::array<double, 4> crest{};     // max / arithmetic mean of bin power
};

/// Per-band flatness and crest over power bands 250-500, 500-1000,
/// 1000-2000, 2000-4000 Hz. Empty or all-zero bands fall back to 1.
BandFlatnessCrest band_flatness_crest(const Spectrum& spec);

/// T1/T2/T3 partition of amps (1-based harmonic semantics):
/// T1 = a(1)/S, T2 = (a(2)+a(3)+a(4))/S, T3 = sum_{h>=5} a(h)/S with
/// S = sum a(h). All zero when S == 0.
std::array<double, 3> tristimulus(std::span<const double> amps);

/// sum over odd 1-based indices of a^2 over the even sum, capped at
/// kOddEvenRatioCap when the denominator is zero.
inline constexpr double kOddEvenRatioCap = 1e12;
double odd_even_ratio(std::span<const double> amps);

/// Mean absolute deviation of amps from their 3-point moving average.
double envelope_deviation(std::span<const double> amps);

struct HarmonicFeatures {
  std::array<double, 3> tristimulus{};
  double odd_even_ratio = 0.0;
  double deviation = 0.0;
  double inharmonicity = 0.0;
  bool degenerate = false;  // all partial amplitudes zero
};

/// squared_amps switches the tristimulus/odd-even ratios to a(h)^2 (the
/// "energy" reading); amplitudes are the default.
HarmonicFeatures harmonic_features(const HarmonicPeaks& peaks, bool squared_amps = false);

struct PerceptualFeatures {
  double loudness = 0.0;
  std::array<double, kBarkBandCount> specific_loudness{};  // N'(z) = E(z)^0.23
  double sharpness = 0.0;
  double spread = 0.0;  // (N - max N') / N
};

PerceptualFeatures perceptual_features(const Spectrum& spec);

struct TemporalFeatures {
  double zcr = 0.0;           // sign changes per second
  double total_energy = 0.0;  // mean of sample^2
};

TemporalFeatures temporal_features(std::span<const double> frame, int sample_rate);

// ---------------------------------------------------------------------------
// Feature matrix
// ---------------------------------------------------------------------------

/// Frames x features matrix of descriptor trajectories (row-major). The
/// analysis pipeline always produces the canonical 52 columns; tests may
/// build matrices with arbitrary column names.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<double> data;        // rows() * cols(), row-major
  std::vector<double> timestamps;  // seconds, one per row
  double feature_rate = 0.0;       // Hz
  std::string source_id;

  std::size_t cols() const { return names.size(); }
  std::size_t rows() const { return names.empty() ? 0 : data.size() / names.size(); }

  double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols(), cols()}; }
  std::vector<double> column(std::size_t c) const;
  int column_index(std::string_view name) const;  // -1 if absent
};

/// Runs the full per-frame descriptor stack over a buffer and assembles the
/// canonical 52-column trajectory matrix. Unvoiced frames hold the
/// harmonic/perceptual families at the previous voiced value when
/// cfg.hold_unvoiced is set (0 before the first voiced frame). Never emits
/// NaN. Throws InvalidArgument if the buffer is shorter than one frame.
FeatureMatrix compute_feature_matrix(const AudioBuffer& buf, const AnalysisConfig& cfg,
                                     std::string source_id = {});

}  // namespace trem
