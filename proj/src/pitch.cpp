#include "trem/pitch.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "trem/errors.h"

namespace trem {

namespace {

// Classic YIN absolute threshold: prefer the first sufficiently deep dip to
// avoid subharmonic (octave-low) picks.
constexpr double kAbsoluteDipThreshold = 0.1;

// Parabolic refinement of a minimum at integer index i given neighbors.
// Returns fractional offset in [-0.5, 0.5] and interpolated value.
struct ParabolicFit {
  double offset = 0.0;
  double value = 0.0;
};

ParabolicFit refine_parabola(double ym1, double y0, double yp1) {
  const double denom = ym1 - 2.0 * y0 + yp1;
  ParabolicFit fit{0.0, y0};
  if (std::abs(denom) > 1e-300) {
    double d = 0.5 * (ym1 - yp1) / denom;
    d = std::clamp(d, -0.5, 0.5);
    fit.offset = d;
    fit.value = y0 - 0.25 * (ym1 - yp1) * d;
  }
  return fit;
}

}  // namespace

std::vector<double> HarmonicPeaks::amps() const {
  std::vector<double> out(partials.size());
  for (std::size_t i = 0; i < partials.size(); ++i) out[i] = partials[i].amp;
  return out;
}

std::vector<double> HarmonicPeaks::freqs() const {
  std::vector<double> out(partials.size());
  for (std::size_t i = 0; i < partials.size(); ++i) out[i] = partials[i].freq;
  return out;
}

F0Estimate estimate_f0(std::span<const double> frame, int sample_rate, double fmin,
                       double fmax, double voicing_threshold) {
  if (sample_rate <= 0) throw InvalidArgument("estimate_f0: sample_rate must be positive");
  if (!(fmin > 0.0) || !(fmin < fmax) || !(fmax < sample_rate / 2.0)) {
    throw InvalidArgument("estimate_f0: need 0 < fmin < fmax < Nyquist");
  }
  const int n = static_cast<int>(frame.size());
  const int tau_max = static_cast<int>(std::ceil(sample_rate / fmin));
  const int tau_min = std::max(2, static_cast<int>(std::floor(sample_rate / fmax)));
  if (n < 2 * tau_max) {
    throw InvalidArgument("estimate_f0: frame must be at least 2 * sample_rate / fmin samples");
  }
  const int window = n / 2;  // integration window; tau_max <= window

  // Difference function d(tau) over the first `window` samples.
  std::vector<double> diff(static_cast<std::size_t>(tau_max) + 1, 0.0);
  for (int tau = 1; tau <= tau_max; ++tau) {
    double acc = 0.0;
    const double* x = frame.data();
    for (int i = 0; i < window; ++i) {
      const double d = x[i] - x[i + tau];
      acc += d * d;
    }
    diff[tau] = acc;
  }

  // Cumulative-mean-normalized difference d'(tau).
  std::vector<double> norm(diff.size(), 1.0);
  double running = 0.0;
  for (int tau = 1; tau <= tau_max; ++tau) {
    running += diff[tau];
    norm[tau] = running > 0.0 ? diff[tau] * tau / running : 1.0;
  }

  // First dip below the absolute threshold, descended to its local minimum;
  // fall back to the global minimum in range.
  int best = -1;
  for (int tau = tau_min; tau <= tau_max; ++tau) {
    if (norm[tau] < kAbsoluteDipThreshold) {
      while (tau + 1 <= tau_max && norm[tau + 1] < norm[tau]) ++tau;
      best = tau;
      break;
    }
  }
  if (best < 0) {
    best = tau_min;
    for (int tau = tau_min + 1; tau <= tau_max; ++tau) {
      if (norm[tau] < norm[best]) best = tau;
    }
  }

  double tau_refined = best;
  double dip = norm[best];
  if (best > 1 && best < tau_max) {
    const ParabolicFit fit = refine_parabola(norm[best - 1], norm[best], norm[best + 1]);
    tau_refined = best + fit.offset;
    dip = std::min(dip, fit.value);
  }

  F0Estimate est;
  est.confidence = std::clamp(1.0 - dip, 0.0, 1.0);
  if (est.confidence >= voicing_threshold && tau_refined > 0.0) {
    est.f0 = std::clamp(sample_rate / tau_refined, fmin, fmax);
  } else {
    est.f0 = 0.0;
  }
  return est;
}

HarmonicPeaks extract_harmonics(const Spectrum& spec, double f0, int max_h, double tol) {
  if (!(f0 > 0.0)) throw InvalidArgument("extract_harmonics: f0 must be positive");
  if (max_h < 1) throw InvalidArgument("extract_harmonics: max_h must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("extract_harmonics: tol must be positive");

  const double nyquist = spec.nyquist();
  const std::size_t bins = spec.size();

  HarmonicPeaks peaks;
  peaks.f0 = f0;

  for (int h = 1; h <= max_h; ++h) {
    const double target = h * f0;
    if (!(target < nyquist)) break;  // clip instead of erroring
    const double tol_hz = tol * target;

    auto to_bin = [&](double hz) { return hz / spec.bin_hz; };
    long lo = static_cast<long>(std::floor(to_bin(target - tol_hz)));
    long hi = static_cast<long>(std::ceil(to_bin(target + tol_hz)));
    const long center = std::lround(to_bin(target));
    lo = std::min(lo, center);
    hi = std::max(hi, center);
    lo = std::max<long>(lo, 1);
    hi = std::min<long>(hi, static_cast<long>(bins) - 2);

    Partial partial;
    partial.h = h;
    partial.freq = target;
    partial.amp = 0.0;

    long best = -1;
    for (long b = lo; b <= hi; ++b) {
      const double m = spec.magnitudes[b];
      if (m >= spec.magnitudes[b - 1] && m >= spec.magnitudes[b + 1] && m > 0.0) {
        if (best < 0 || m > spec.magnitudes[best]) best = b;
      }
    }
    if (best >= 0) {
      const double m0 = spec.magnitudes[best - 1];
      const double m1 = spec.magnitudes[best];
      const double m2 = spec.magnitudes[best + 1];
      double freq = spec.bin_freq(best);
      double amp = m1;
      if (m0 > 0.0 && m2 > 0.0) {
        // Log-magnitude parabolic interpolation for the offset, then the
        // window's mainlobe response de-biases the amplitude.
        const ParabolicFit fit = refine_parabola(std::log(m0), std::log(m1), std::log(m2));
        freq = (best + fit.offset) * spec.bin_hz;
        amp = m1 / window_mainlobe_response(spec.window, fit.offset);
      }
      partial.freq = std::clamp(freq, target - tol_hz, target + tol_hz);
      partial.amp = amp;
    }
    peaks.partials.push_back(partial);
  }
  peaks.max_h = static_cast<int>(peaks.partials.size());
  return peaks;
}

EnergySplit energy_split(const Spectrum& spec, const HarmonicPeaks& peaks) {
  EnergySplit split;

  // Parseval under the peak-normalized convention (see spectrum.h), then
  // rescaled so a sinusoid of amplitude a contributes a^2 for any window.
  const std::size_t bins = spec.size();
  double half_weighted = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double m2 = spec.magnitudes[b] * spec.magnitudes[b];
    half_weighted += (b == 0 || b == bins - 1) ? m2 : 0.5 * m2;
  }
  const double s1 = spec.window_sum;
  const double s2 = spec.window_sq_sum;
  const double n = spec.frame_size;
  split.total = half_weighted * 2.0 * s1 * s1 / (n * s2);

  for (const Partial& p : peaks.partials) split.harmonic += p.amp * p.amp;
  split.noise = std::max(0.0, split.total - split.harmonic);
  return split;
}

}  // namespace trem
