#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "trem/errors.h"
#include "trem/pitch.h"
#include "trem/spectrum.h"

#include "oracles.hpp"

using namespace trem;

namespace {

constexpr int kSr = 44100;

// Exhaustive integer-lag difference-function search: the fundamental is the
// smallest lag whose normalized difference is commensurate with the global
// minimum (any integer multiple of the true period dips equally well, so a
// bare argmin would report subharmonics).
double brute_force_lag(std::span<const double> frame, int sr, double fmin, double fmax) {
  const int tau_min = std::max(2, static_cast<int>(std::floor(sr / fmax)));
  const int tau_max = static_cast<int>(std::ceil(sr / fmin));
  const int window = static_cast<int>(frame.size()) / 2;
  std::vector<double> d(static_cast<std::size_t>(tau_max) + 1, 1.0);
  double running = 0.0;
  for (int tau = 1; tau <= tau_max; ++tau) {
    double acc = 0.0;
    for (int i = 0; i < window; ++i) {
      const double diff = frame[i] - frame[i + tau];
      acc += diff * diff;
    }
    running += acc;
    d[tau] = running > 0.0 ? acc * tau / running : 1.0;
  }
  double global = 1.0;
  for (int tau = tau_min; tau <= tau_max; ++tau) global = std::min(global, d[tau]);
  const double admissible = std::max(2.0 * global, global + 0.05);
  for (int tau = tau_min; tau <= tau_max; ++tau) {
    const bool local_min = d[tau] <= d[std::max(1, tau - 1)] &&
                           (tau + 1 > tau_max || d[tau] <= d[tau + 1]);
    if (local_min && d[tau] <= admissible) return static_cast<double>(sr) / tau;
  }
  return static_cast<double>(sr) / tau_max;
}

}  // namespace

TEST_CASE("pure 440 Hz sine is pitched within 2 Hz with high confidence") {
  const auto frame = oracle::sine(440.0, 1.0, kSr, 2048);
  const F0Estimate est = estimate_f0(frame, kSr, 70.0, 1200.0);
  CHECK(est.f0 == doctest::Approx(440.0).epsilon(2.0 / 440.0));
  CHECK(est.confidence > 0.9);
}

TEST_CASE("silence is unvoiced") {
  const std::vector<double> frame(2048, 0.0);
  const F0Estimate est = estimate_f0(frame, kSr, 70.0, 1200.0);
  CHECK(est.f0 == 0.0);
  CHECK(est.confidence == 0.0);
}

TEST_CASE("sawtooth at 220 Hz: no octave error, matches exhaustive lag search") {
  const auto frame = oracle::sawtooth(220.0, kSr, 2048);
  const F0Estimate est = estimate_f0(frame, kSr, 70.0, 1200.0);
  CHECK(est.f0 == doctest::Approx(220.0).epsilon(1.1 / 220.0));

  const double brute = brute_force_lag(frame, kSr, 70.0, 1200.0);
  CHECK(est.f0 == doctest::Approx(brute).epsilon(0.01));
}

TEST_CASE("accuracy contract: clean harmonic tones across [80, 1000] Hz within 0.5%") {
  const std::vector<double> amps = {1.0, 0.5, 0.33, 0.25};
  for (double f0 : {80.0, 110.0, 160.0, 220.0, 330.0, 440.0, 640.0, 880.0, 1000.0}) {
    const auto frame = oracle::additive(f0, amps, kSr, 2048);
    const F0Estimate est = estimate_f0(frame, kSr, 70.0, 1200.0);
    REQUIRE(est.voiced());
    CHECK(est.f0 == doctest::Approx(f0).epsilon(0.005));
  }
}

TEST_CASE("pitch-shift equivariance: doubling f0 doubles the estimate") {
  const std::vector<double> amps = {1.0, 0.4, 0.2};
  const auto low = oracle::additive(165.0, amps, kSr, 2048);
  const auto high = oracle::additive(330.0, amps, kSr, 2048);
  const double f_low = estimate_f0(low, kSr, 70.0, 1200.0).f0;
  const double f_high = estimate_f0(high, kSr, 70.0, 1200.0).f0;
  CHECK(f_high == doctest::Approx(2.0 * f_low).epsilon(0.01));
}

TEST_CASE("estimate_f0 rejects bad ranges and short frames") {
  const std::vector<double> frame(2048, 0.0);
  CHECK_THROWS_AS(estimate_f0(frame, kSr, 1200.0, 70.0), InvalidArgument);
  CHECK_THROWS_AS(estimate_f0(frame, kSr, 70.0, 44100.0), InvalidArgument);
  const std::vector<double> tiny(256, 0.0);
  CHECK_THROWS_AS(estimate_f0(tiny, kSr, 70.0, 1200.0), InvalidArgument);
}

TEST_CASE("harmonics of a unit sine: a(1) ~ 1, higher partials ~ 0") {
  const auto frame = oracle::sine(440.0, 1.0, kSr, 2048);
  const Spectrum spec = spectrum_of_frame(frame, kSr, Window::hann);
  const HarmonicPeaks peaks = extract_harmonics(spec, 440.0, 5, 0.03);
  REQUIRE(peaks.partials.size() == 5);
  CHECK(peaks.partials[0].amp == doctest::Approx(1.0).epsilon(0.02));
  CHECK(peaks.partials[0].freq == doctest::Approx(440.0).epsilon(0.01));
  for (std::size_t h = 1; h < 5; ++h) CHECK(peaks.partials[h].amp < 0.01);
}

TEST_CASE("additive 1/h amplitudes recovered within 2%") {
  const std::vector<double> amps = {1.0, 0.5, 1.0 / 3.0, 0.25, 0.2};
  const auto frame = oracle::additive(220.0, amps, kSr, 4096);
  const Spectrum spec = spectrum_of_frame(frame, kSr, Window::hann);
  const HarmonicPeaks peaks = extract_harmonics(spec, 220.0, 5, 0.03);
  REQUIRE(peaks.partials.size() == 5);
  for (std::size_t h = 0; h < 5; ++h) {
    CHECK(peaks.partials[h].amp == doctest::Approx(amps[h]).epsilon(0.02));
    CHECK(std::abs(peaks.partials[h].freq - 220.0 * (h + 1)) <=
          0.03 * 220.0 * (h + 1));
  }
}

TEST_CASE("partial list is clipped at Nyquist without erroring") {
  const auto frame = oracle::sine(5000.0, 1.0, kSr, 2048);
  const Spectrum spec = spectrum_of_frame(frame, kSr, Window::hann);
  const HarmonicPeaks peaks = extract_harmonics(spec, 5000.0, 20, 0.03);
  CHECK(peaks.max_h == 4);  // 5 * 5000 >= 22050
  CHECK(peaks.partials.size() == 4);
  for (const Partial& p : peaks.partials) CHECK(p.freq < 22050.0);
}

TEST_CASE("extract_harmonics requires voiced input") {
  const std::vector<double> frame(2048, 0.0);
  const Spectrum spec = spectrum_of_frame(frame, kSr, Window::hann);
  CHECK_THROWS_AS(extract_harmonics(spec, 0.0, 5, 0.03), InvalidArgument);
}

TEST_CASE("energy split: silence, pure tone, noise") {
  SUBCASE("silence is all zero") {
    const std::vector<double> frame(2048, 0.0);
    const Spectrum spec = spectrum_of_frame(frame, kSr, Window::hann);
    HarmonicPeaks peaks;
    peaks.f0 = 100.0;
    const EnergySplit es = energy_split(spec, peaks);
    CHECK(es.total == 0.0);
    CHECK(es.harmonic == 0.0);
    CHECK(es.noise == 0.0);
  }

  SUBCASE("pure harmonic tone is nearly all harmonic") {
    const std::vector<double> amps = {0.8, 0.4, 0.2, 0.1};
    const auto frame = oracle::additive(330.0, amps, kSr, 2048);
    const Spectrum spec = spectrum_of_frame(frame, kSr, Window::hann);
    const HarmonicPeaks peaks = extract_harmonics(spec, 330.0, 10, 0.03);
    const EnergySplit es = energy_split(spec, peaks);
    REQUIRE(es.total > 0.0);
    CHECK(es.noise / es.total < 0.05);
  }

  SUBCASE("white noise has negligible harmonic share") {
    std::mt19937_64 rng(7);
    std::vector<double> frame(2048);
    for (double& v : frame) v = oracle::uniform(rng, -1.0, 1.0);
    const Spectrum spec = spectrum_of_frame(frame, kSr, Window::hann);
    const HarmonicPeaks peaks = extract_harmonics(spec, 200.0, 20, 0.03);
    const EnergySplit es = energy_split(spec, peaks);
    REQUIRE(es.total > 0.0);
    CHECK(es.harmonic / es.total < 0.25);
    CHECK(es.harmonic <= es.total + 1e-9);
  }
}

TEST_CASE("harmonic energy never exceeds total (within recovery error)") {
  // Hann sidelobes sit at -31 dB, so neighbours can inflate each recovered
  // amplitude by ~3%; 5% total headroom covers the stack-up.
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> amps(8);
    for (double& a : amps) a = oracle::uniform(rng, 0.0, 1.0);
    const double f0 = oracle::uniform(rng, 120.0, 600.0);
    const auto frame = oracle::additive(f0, amps, kSr, 2048);
    const Spectrum spec = spectrum_of_frame(frame, kSr, Window::hann);
    const HarmonicPeaks peaks = extract_harmonics(spec, f0, 8, 0.03);
    const EnergySplit es = energy_split(spec, peaks);
    CHECK(es.harmonic <= es.total * 1.05 + 1e-9);
    CHECK(es.noise >= 0.0);
  }
}
