#include "trem/descriptors.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "trem/errors.h"

namespace trem {

namespace {

// Flatness/crest analysis bands in Hz.
constexpr double kBandEdges[5] = {250.0, 500.0, 1000.0, 2000.0, 4000.0};

constexpr double kLoudnessExponent = 0.23;

const std::array<std::string_view, kFeatureCount> kFeatureNames = {
    // spectral family (magnitude bins over Hz)
    "SpectralCentroid", "SpectralSpread", "SpectralSkewness", "SpectralKurtosis",
    "SpectralSlope", "SpectralDecrease", "SpectralRolloff", "SpectralVariation",
    "SpectralFlatness1", "SpectralFlatness2", "SpectralFlatness3", "SpectralFlatness4",
    "SpectralCrest1", "SpectralCrest2", "SpectralCrest3", "SpectralCrest4",
    // harmonic family (partial amplitudes over Hz)
    "FundamentalFrequency", "HarmonicSpectralCentroid", "HarmonicSpectralSpread",
    "HarmonicSpectralSkewness", "HarmonicSpectralKurtosis", "HarmonicSpectralSlope",
    "HarmonicSpectralDecrease", "HarmonicSpectralRolloff", "HarmonicSpectralVariation",
    "HarmonicSpectralDeviation", "HarmonicTristimulus1", "HarmonicTristimulus2",
    "HarmonicTristimulus3", "HarmonicOddToEvenRatio", "Inharmonicity", "HarmonicEnergy",
    "NoiseEnergy", "Noisiness",
    // perceptual family (specific loudness over Bark bands)
    "Loudness", "Sharpness", "Spread", "PerceptualSpectralCentroid",
    "PerceptualSpectralSpread", "PerceptualSpectralSkewness", "PerceptualSpectralKurtosis",
    "PerceptualSpectralSlope", "PerceptualSpectralDecrease", "PerceptualSpectralRolloff",
    "PerceptualSpectralVariation", "PerceptualSpectralDeviation", "PerceptualTristimulus1",
    "PerceptualTristimulus2", "PerceptualTristimulus3", "PerceptualOddToEvenRatio",
    // temporal
    "TotalEnergy", "SignalZeroCrossingRate"};

// Zwicker critical-band edges.
const std::array<double, kBarkBandCount + 1> kBarkEdges = {
    0.0,    100.0,  200.0,  300.0,  400.0,  510.0,  630.0,  770.0,  920.0,
    1080.0, 1270.0, 1480.0, 1720.0, 2000.0, 2320.0, 2700.0, 3150.0, 3700.0,
    4400.0, 5300.0, 6400.0, 7700.0, 9500.0, 12000.0, 15500.0};

std::array<double, kBarkBandCount> make_bark_centers() {
  std::array<double, kBarkBandCount> centers{};
  for (int z = 0; z < kBarkBandCount; ++z) centers[z] = 0.5 * (kBarkEdges[z] + kBarkEdges[z + 1]);
  return centers;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() { return kFeatureNames; }

int feature_index(std::string_view name) {
  for (int i = 0; i < kFeatureCount; ++i) {
    if (iequals(kFeatureNames[i], name)) return i;
  }
  return -1;
}

const std::array<double, kBarkBandCount + 1>& bark_band_edges_hz() { return kBarkEdges; }

const std::array<double, kBarkBandCount>& bark_band_centers_hz() {
  static const auto centers = make_bark_centers();
  return centers;
}

ShapeMoments shape_moments(std::span<const double> weights, std::span<const double> positions) {
  ShapeMoments out;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) {
    out.degenerate = true;
    return out;  // centroid 0, spread 0, skew 0, kurt 3
  }
  double mu = 0.0;
  for (std::size_t b = 0; b < weights.size(); ++b) mu += weights[b] * positions[b];
  mu /= total;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t b = 0; b < weights.size(); ++b) {
    const double p = weights[b] / total;
    const double d = positions[b] - mu;
    const double d2 = d * d;
    m2 += p * d2;
    m3 += p * d2 * d;
    m4 += p * d2 * d2;
  }
  out.centroid = mu;
  out.spread = std::sqrt(std::max(0.0, m2));
  if (out.spread > 0.0) {
    out.skewness = m3 / (out.spread * out.spread * out.spread);
    out.kurtosis = m4 / (m2 * m2);
  } else {
    out.skewness = 0.0;
    out.kurtosis = 3.0;
  }
  return out;
}

EnvelopeStats envelope_stats(std::span<const double> weights, std::span<const double> positions,
                             std::span<const double> prev_weights) {
  EnvelopeStats out;
  const std::size_t n = weights.size();
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (n == 0 || !(total > 0.0)) {
    out.degenerate = true;
    return out;
  }

  // Least-squares slope of w over x, normalized by sum(w) for gain
  // invariance (descriptor-report convention).
  if (n >= 2) {
    double sx = 0.0, sw = 0.0, sxx = 0.0, sxw = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      sx += positions[b];
      sw += weights[b];
      sxx += positions[b] * positions[b];
      sxw += positions[b] * weights[b];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) > 0.0) out.slope = (n * sxw - sx * sw) / denom / total;
  }

  // Decrease over the 1-based bin index.
  if (n >= 2) {
    double acc = 0.0, tail = 0.0;
    for (std::size_t b = 1; b < n; ++b) {
      acc += (weights[b] - weights[0]) / static_cast<double>(b);
      tail += weights[b];
    }
    if (tail > 0.0) out.decrease = acc / tail;
  }

  // Rolloff: smallest position holding >= 95% of sum(w^2), in position order.
  double energy = 0.0;
  for (double w : weights) energy += w * w;
  const double target = 0.95 * energy;
  double cum = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    cum += weights[b] * weights[b];
    if (cum >= target) {
      out.rolloff = positions[b];
      break;
    }
  }

  // Variation vs previous frame, zero-padded to a common length.
  if (!prev_weights.empty()) {
    const std::size_t m = std::max(n, prev_weights.size());
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      const double a = b < n ? weights[b] : 0.0;
      const double p = b < prev_weights.size() ? prev_weights[b] : 0.0;
      dot += a * p;
      na += a * a;
      nb += p * p;
    }
    if (na > 0.0 && nb > 0.0) out.variation = 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
  }
  return out;
}

BandFlatnessCrest band_flatness_crest(const Spectrum& spec) {
  if (spec.nyquist() < kBandEdges[4] - 1e-9) {
    throw InvalidArgument("band_flatness_crest: needs sample_rate >= 8000 Hz");
  }
  BandFlatnessCrest out;
  for (int band = 0; band < 4; ++band) {
    const double lo = kBandEdges[band];
    const double hi = kBandEdges[band + 1];
    double sum = 0.0, log_sum = 0.0, max_p = 0.0;
    std::size_t count = 0;
    bool has_zero = false;
    for (std::size_t b = 0; b < spec.size(); ++b) {
      const double f = spec.bin_freq(b);
      if (f < lo || f >= hi) continue;
      const double p = spec.magnitudes[b] * spec.magnitudes[b];
      ++count;
      sum += p;
      max_p = std::max(max_p, p);
      if (p > 0.0) {
        log_sum += std::log(p);
      } else {
        has_zero = true;
      }
    }
    if (count == 0 || !(sum > 0.0)) {
      out.flatness[band] = 1.0;
      out.crest[band] = 1.0;
      continue;
    }
    const double mean = sum / static_cast<double>(count);
    out.flatness[band] = has_zero ? 0.0 : std::exp(log_sum / static_cast<double>(count)) / mean;
    out.crest[band] = max_p / mean;
  }
  return out;
}

std::array<double, 3> tristimulus(std::span<const double> amps) {
  std::array<double, 3> t{0.0, 0.0, 0.0};
  const double total = std::accumulate(amps.begin(), amps.end(), 0.0);
  if (!(total > 0.0)) return t;
  const std::size_t n = amps.size();
  t[0] = amps[0] / total;
  double mid = 0.0;
  for (std::size_t i = 1; i < std::min<std::size_t>(4, n); ++i) mid += amps[i];
  t[1] = mid / total;
  double high = 0.0;
  for (std::size_t i = 4; i < n; ++i) high += amps[i];
  t[2] = high / total;
  return t;
}

double odd_even_ratio(std::span<const double> amps) {
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double sq = amps[i] * amps[i];
    if (i % 2 == 0) {
      odd += sq;  // 1-based odd harmonics sit at even 0-based indices
    } else {
      even += sq;
    }
  }
  if (even == 0.0) return odd > 0.0 ? kOddEvenRatioCap : 0.0;
  return std::min(odd / even, kOddEvenRatioCap);
}

double envelope_deviation(std::span<const double> amps) {
  const std::size_t n = amps.size();
  if (n == 0) return 0.0;
  if (n == 1) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double env;
    if (i == 0) {
      env = 0.5 * (amps[0] + amps[1]);
    } else if (i == n - 1) {
      env = 0.5 * (amps[n - 2] + amps[n - 1]);
    } else {
      env = (amps[i - 1] + amps[i] + amps[i + 1]) / 3.0;
    }
    acc += std::abs(amps[i] - env);
  }
  return acc / static_cast<double>(n);
}

HarmonicFeatures harmonic_features(const HarmonicPeaks& peaks, bool squared_amps) {
  HarmonicFeatures out;
  const std::vector<double> amps = peaks.amps();
  const bool all_zero = std::all_of(amps.begin(), amps.end(), [](double a) { return a == 0.0; });
  if (amps.empty() || all_zero) {
    out.degenerate = true;
    return out;
  }

  if (squared_amps) {
    std::vector<double> sq(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) sq[i] = amps[i] * amps[i];
    out.tristimulus = tristimulus(sq);
  } else {
    out.tristimulus = tristimulus(amps);
  }
  out.odd_even_ratio = odd_even_ratio(amps);
  out.deviation = envelope_deviation(amps);

  double num = 0.0, den = 0.0;
  for (const Partial& p : peaks.partials) {
    const double a2 = p.amp * p.amp;
    num += std::abs(p.freq - p.h * peaks.f0) * a2;
    den += a2;
  }
  if (den > 0.0 && peaks.f0 > 0.0) out.inharmonicity = 2.0 / peaks.f0 * num / den;
  return out;
}

PerceptualFeatures perceptual_features(const Spectrum& spec) {
  PerceptualFeatures out;
  std::array<double, kBarkBandCount> band_energy{};
  for (std::size_t b = 0; b < spec.size(); ++b) {
    const double f = spec.bin_freq(b);
    if (f >= kBarkEdges.back()) break;
    // Linear scan is fine: edges are few and bins are ordered.
    int z = 0;
    while (z < kBarkBandCount && f >= kBarkEdges[z + 1]) ++z;
    if (z < kBarkBandCount) band_energy[z] += spec.magnitudes[b] * spec.magnitudes[b];
  }

  double total = 0.0, max_n = 0.0;
  for (int z = 0; z < kBarkBandCount; ++z) {
    const double nz = std::pow(band_energy[z], kLoudnessExponent);
    out.specific_loudness[z] = nz;
    total += nz;
    max_n = std::max(max_n, nz);
  }
  out.loudness = total;
  if (total > 0.0) {
    double acc = 0.0;
    for (int z = 0; z < kBarkBandCount; ++z) {
      const int zi = z + 1;  // 1-based band index
      const double g = zi <= 15 ? 1.0 : 0.066 * std::exp(0.171 * zi);
      acc += zi * g * out.specific_loudness[z];
    }
    out.sharpness = 0.11 * acc / total;
    out.spread = (total - max_n) / total;
  }
  return out;
}

TemporalFeatures temporal_features(std::span<const double> frame, int sample_rate) {
  TemporalFeatures out;
  if (frame.empty() || sample_rate <= 0) return out;
  std::size_t crossings = 0;
  double energy = 0.0;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    energy += frame[i] * frame[i];
    if (i > 0 && frame[i - 1] * frame[i] < 0.0) ++crossings;
  }
  const double duration = static_cast<double>(frame.size()) / sample_rate;
  out.zcr = static_cast<double>(crossings) / duration;
  out.total_energy = energy / static_cast<double>(frame.size());
  return out;
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

int FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (iequals(names[c], name)) return static_cast<int>(c);
  }
  return -1;
}

namespace {

enum FeatureId : int {
  kSpectralCentroid = 0, kSpectralSpread, kSpectralSkewness, kSpectralKurtosis,
  kSpectralSlope, kSpectralDecrease, kSpectralRolloff, kSpectralVariation,
  kSpectralFlatness1, kSpectralFlatness2, kSpectralFlatness3, kSpectralFlatness4,
  kSpectralCrest1, kSpectralCrest2, kSpectralCrest3, kSpectralCrest4,
  kFundamentalFrequency, kHarmonicSpectralCentroid, kHarmonicSpectralSpread,
  kHarmonicSpectralSkewness, kHarmonicSpectralKurtosis, kHarmonicSpectralSlope,
  kHarmonicSpectralDecrease, kHarmonicSpectralRolloff, kHarmonicSpectralVariation,
  kHarmonicSpectralDeviation, kHarmonicTristimulus1, kHarmonicTristimulus2,
  kHarmonicTristimulus3, kHarmonicOddToEvenRatio, kInharmonicity, kHarmonicEnergy,
  kNoiseEnergy, kNoisiness,
  kLoudness, kSharpness, kSpread, kPerceptualSpectralCentroid, kPerceptualSpectralSpread,
  kPerceptualSpectralSkewness, kPerceptualSpectralKurtosis, kPerceptualSpectralSlope,
  kPerceptualSpectralDecrease, kPerceptualSpectralRolloff, kPerceptualSpectralVariation,
  kPerceptualSpectralDeviation, kPerceptualTristimulus1, kPerceptualTristimulus2,
  kPerceptualTristimulus3, kPerceptualOddToEvenRatio,
  kTotalEnergy, kSignalZeroCrossingRate,
};

// Columns held at the previous voiced value over unvoiced stretches: both
// prefixed families plus the harmonic-model outputs without the prefix.
bool is_held_column(int id) {
  const std::string_view name = kFeatureNames[id];
  return name.starts_with("Harmonic") || name.starts_with("Perceptual") ||
         id == kInharmonicity || id == kNoiseEnergy || id == kNoisiness;
}

}  // namespace

FeatureMatrix compute_feature_matrix(const AudioBuffer& buf, const AnalysisConfig& cfg,
                                     std::string source_id) {
  cfg.validate();
  if (buf.samples.size() < static_cast<std::size_t>(cfg.frame_size)) {
    throw InvalidArgument("compute_feature_matrix: buffer shorter than one frame");
  }
  if (cfg.frame_size < 2.0 * buf.sample_rate / cfg.f0_min_hz) {
    throw InvalidArgument(
        "compute_feature_matrix: frame_size must be >= 2 * sample_rate / f0_min_hz "
        "(raise f0_min_hz or frame_size)");
  }

  const FrameSequence frames = frame_signal(buf, cfg.frame_size, cfg.hop_size);
  SpectrumAnalyzer analyzer(cfg.frame_size, buf.sample_rate, cfg.window);

  FeatureMatrix m;
  m.names.assign(kFeatureNames.begin(), kFeatureNames.end());
  m.data.assign(frames.count() * kFeatureCount, 0.0);
  m.timestamps.resize(frames.count());
  m.feature_rate = frames.frame_rate();
  m.source_id = std::move(source_id);

  std::vector<double> bin_freqs;
  std::vector<double> prev_mags;
  std::vector<double> prev_loudness;
  std::vector<double> prev_harm_amps;  // last voiced frame
  std::array<double, kFeatureCount> held{};  // startup: zeros

  const auto& bark_centers = bark_band_centers_hz();
  const std::span<const double> bark_pos(bark_centers.data(), bark_centers.size());

  for (std::size_t i = 0; i < frames.count(); ++i) {
    const auto frame = frames.frame(i);
    const double t = frames.timestamp(i);
    m.timestamps[i] = t;
    double* row = m.data.data() + i * kFeatureCount;

    const Spectrum spec = analyzer.analyze(frame, t);
    if (bin_freqs.empty()) {
      bin_freqs.resize(spec.size());
      for (std::size_t b = 0; b < spec.size(); ++b) bin_freqs[b] = spec.bin_freq(b);
    }

    const TemporalFeatures temporal = temporal_features(frame, buf.sample_rate);
    row[kTotalEnergy] = temporal.total_energy;
    row[kSignalZeroCrossingRate] = temporal.zcr;

    const ShapeMoments sm = shape_moments(spec.magnitudes, bin_freqs);
    row[kSpectralCentroid] = sm.centroid;
    row[kSpectralSpread] = sm.spread;
    row[kSpectralSkewness] = sm.skewness;
    row[kSpectralKurtosis] = sm.kurtosis;

    const EnvelopeStats se = envelope_stats(spec.magnitudes, bin_freqs, prev_mags);
    row[kSpectralSlope] = se.slope;
    row[kSpectralDecrease] = se.decrease;
    row[kSpectralRolloff] = se.rolloff;
    row[kSpectralVariation] = se.variation;

    const BandFlatnessCrest fc = band_flatness_crest(spec);
    for (int b = 0; b < 4; ++b) {
      row[kSpectralFlatness1 + b] = fc.flatness[b];
      row[kSpectralCrest1 + b] = fc.crest[b];
    }

    const PerceptualFeatures pf = perceptual_features(spec);
    row[kLoudness] = pf.loudness;
    row[kSharpness] = pf.sharpness;
    row[kSpread] = pf.spread;

    const std::span<const double> nz(pf.specific_loudness.data(), pf.specific_loudness.size());
    const ShapeMoments pm = shape_moments(nz, bark_pos);
    row[kPerceptualSpectralCentroid] = pm.centroid;
    row[kPerceptualSpectralSpread] = pm.spread;
    row[kPerceptualSpectralSkewness] = pm.skewness;
    row[kPerceptualSpectralKurtosis] = pm.kurtosis;

    const EnvelopeStats pe = envelope_stats(nz, bark_pos, prev_loudness);
    row[kPerceptualSpectralSlope] = pe.slope;
    row[kPerceptualSpectralDecrease] = pe.decrease;
    row[kPerceptualSpectralRolloff] = pe.rolloff;
    row[kPerceptualSpectralVariation] = pe.variation;

    const auto pt = tristimulus(nz);
    row[kPerceptualTristimulus1] = pt[0];
    row[kPerceptualTristimulus2] = pt[1];
    row[kPerceptualTristimulus3] = pt[2];
    row[kPerceptualOddToEvenRatio] = odd_even_ratio(nz);
    row[kPerceptualSpectralDeviation] = envelope_deviation(nz);

    const F0Estimate f0 = estimate_f0(frame, buf.sample_rate, cfg.f0_min_hz, cfg.f0_max_hz,
                                      cfg.voicing_threshold);
    row[kFundamentalFrequency] = f0.f0;

    if (f0.voiced()) {
      const HarmonicPeaks peaks =
          extract_harmonics(spec, f0.f0, cfg.max_harmonics, cfg.harmonic_tol);
      const std::vector<double> amps = peaks.amps();
      const std::vector<double> hfreqs = peaks.freqs();

      const EnergySplit es = energy_split(spec, peaks);
      row[kHarmonicEnergy] = es.harmonic;
      row[kNoiseEnergy] = es.noise;
      row[kNoisiness] = es.total > 0.0 ? es.noise / es.total : 0.0;

      const HarmonicFeatures hf = harmonic_features(peaks, cfg.tristimulus_squared);
      row[kHarmonicTristimulus1] = hf.tristimulus[0];
      row[kHarmonicTristimulus2] = hf.tristimulus[1];
      row[kHarmonicTristimulus3] = hf.tristimulus[2];
      row[kHarmonicOddToEvenRatio] = hf.odd_even_ratio;
      row[kHarmonicSpectralDeviation] = hf.deviation;
      row[kInharmonicity] = hf.inharmonicity;

      const ShapeMoments hm = shape_moments(amps, hfreqs);
      row[kHarmonicSpectralCentroid] = hm.centroid;
      row[kHarmonicSpectralSpread] = hm.spread;
      row[kHarmonicSpectralSkewness] = hm.skewness;
      row[kHarmonicSpectralKurtosis] = hm.kurtosis;

      const EnvelopeStats he = envelope_stats(amps, hfreqs, prev_harm_amps);
      row[kHarmonicSpectralSlope] = he.slope;
      row[kHarmonicSpectralDecrease] = he.decrease;
      row[kHarmonicSpectralRolloff] = he.rolloff;
      row[kHarmonicSpectralVariation] = he.variation;

      prev_harm_amps = amps;
      for (int c = 0; c < kFeatureCount; ++c) {
        if (is_held_column(c)) held[c] = row[c];
      }
    } else if (cfg.hold_unvoiced) {
      for (int c = 0; c < kFeatureCount; ++c) {
        if (is_held_column(c)) row[c] = held[c];
      }
    }
    // else: harmonic-model columns stay 0 and perceptual stays fresh.

    prev_mags = spec.magnitudes;
    prev_loudness.assign(nz.begin(), nz.end());

    for (int c = 0; c < kFeatureCount; ++c) {
      if (!std::isfinite(row[c])) row[c] = 0.0;  // rectangular, NaN-free contract
    }
  }
  return m;
}

}  // namespace trem
