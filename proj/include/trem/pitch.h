#pragma once

#include <span>
#include <vector>

#include "trem/spectrum.h"

namespace trem {

/// Monophonic pitch estimate. f0 == 0 iff the frame is unvoiced
/// (confidence below the voicing threshold).
struct F0Estimate {
  double f0 = 0.0;          // Hz, 0 if unvoiced
  double confidence = 0.0;  // [0, 1]

  bool voiced() const { return f0 > 0.0; }
};

struct Partial {
  int h = 0;          // harmonic index, 1-based
  double freq = 0.0;  // Hz
  double amp = 0.0;   // a(h), sinusoid-amplitude units, >= 0
};

struct HarmonicPeaks {
  double f0 = 0.0;
  std::vector<Partial> partials;  // h strictly increasing from 1
  int max_h = 0;                  // number of partials after Nyquist clipping

  std::vector<double> amps() const;
  std::vector<double> freqs() const;
};

struct EnergySplit {
  double harmonic = 0.0;
  double noise = 0.0;
  double total = 0.0;
};

/// Normalized-difference (YIN-style) pitch estimate with parabolic lag
/// interpolation. Degenerate (all-zero) frames come back unvoiced.
/// Throws InvalidArgument if fmin/fmax are out of range or the frame is
/// shorter than 2 * sample_rate / fmin.
F0Estimate estimate_f0(std::span<const double> frame, int sample_rate, double fmin,
                       double fmax, double voicing_threshold = 0.5);

/// Locates harmonic partials: for each h, the largest local spectral peak
/// within +-tol*h*f0 of h*f0, refined by parabolic bin interpolation.
/// Absent peaks yield amp 0 at the nominal frequency. max_h is clipped so
/// every partial stays below Nyquist. Throws InvalidArgument if f0 <= 0.
HarmonicPeaks extract_harmonics(const Spectrum& spec, double f0, int max_h, double tol);

/// Splits frame energy into harmonic and residual parts.
///
/// total is the windowed frame energy rescaled by 2 * S1^2 / (N * S2) so a
/// sinusoid of amplitude a contributes a^2 regardless of the analysis
/// window; harmonic = sum a(h)^2 is in the same units, and
/// noise = max(0, total - harmonic).
EnergySplit energy_split(const Spectrum& spec, const HarmonicPeaks& peaks);

}  // namespace trem
