#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "trem/errors.h"
#include "trem/spectrum.h"

#include "oracles.hpp"

using namespace trem;

TEST_CASE("all-zero frame gives all-zero magnitudes") {
  const std::vector<double> frame(1024, 0.0);
  const Spectrum spec = spectrum_of_frame(frame, 44100, Window::hann);
  REQUIRE(spec.size() == 513);
  for (double m : spec.magnitudes) CHECK(m == 0.0);
}

TEST_CASE("unit cosine at bin 64, rectangular window: peak exactly 1") {
  const int n = 1024;
  std::vector<double> frame(n);
  for (int t = 0; t < n; ++t) {
    frame[t] = std::cos(2.0 * std::numbers::pi * 64.0 * t / n);
  }
  const Spectrum spec = spectrum_of_frame(frame, 44100, Window::rectangular);
  CHECK(spec.magnitudes[64] == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t b = 0; b < spec.size(); ++b) {
    if (b != 64) CHECK(spec.magnitudes[b] < 1e-9);
  }
}

TEST_CASE("same cosine under hann: peak 1.0 within 1%, energy in +-1 bins") {
  const int n = 1024;
  std::vector<double> frame(n);
  for (int t = 0; t < n; ++t) {
    frame[t] = std::cos(2.0 * std::numbers::pi * 64.0 * t / n);
  }
  const Spectrum spec = spectrum_of_frame(frame, 44100, Window::hann);
  CHECK(spec.magnitudes[64] == doctest::Approx(1.0).epsilon(0.01));
  CHECK(spec.magnitudes[63] == doctest::Approx(0.5).epsilon(0.01));
  CHECK(spec.magnitudes[65] == doctest::Approx(0.5).epsilon(0.01));
  CHECK(spec.magnitudes[60] < 1e-6);
  CHECK(spec.magnitudes[70] < 1e-6);

  // Direct DFT-sum oracle on the windowed frame (absolute tolerance: the
  // naive O(N^2) sum itself carries ~1e-13 rounding).
  const std::vector<double> window = make_window(Window::hann, n);
  const std::vector<double> expected = oracle::dft_magnitudes(frame, window);
  for (std::size_t b = 0; b < spec.size(); ++b) {
    CHECK(std::abs(spec.magnitudes[b] - expected[b]) <= 1e-9);
  }
}

TEST_CASE("Parseval: windowed energy matches the documented spectral identity") {
  std::mt19937_64 rng(42);
  for (Window w : {Window::hann, Window::hamming, Window::rectangular}) {
    const int n = 512;
    std::vector<double> frame(n);
    for (double& v : frame) v = oracle::uniform(rng, -1.0, 1.0);

    const Spectrum spec = spectrum_of_frame(frame, 16000, w);
    const std::vector<double> window = make_window(w, n);

    double time_energy = 0.0;
    for (int t = 0; t < n; ++t) time_energy += frame[t] * window[t] * frame[t] * window[t];

    double weighted = 0.0;
    for (std::size_t b = 0; b < spec.size(); ++b) {
      const double m2 = spec.magnitudes[b] * spec.magnitudes[b];
      weighted += (b == 0 || b + 1 == spec.size()) ? m2 : 0.5 * m2;
    }
    const double spectral_energy = weighted * spec.window_sum * spec.window_sum / n;
    CHECK(spectral_energy == doctest::Approx(time_energy).epsilon(1e-6));
  }
}

TEST_CASE("non-power-of-two frames are rejected") {
  const std::vector<double> frame(1000, 0.0);
  CHECK_THROWS_AS(spectrum_of_frame(frame, 44100, Window::hann), InvalidArgument);
}

TEST_CASE("window names round-trip") {
  for (Window w : {Window::hann, Window::hamming, Window::rectangular}) {
    CHECK(window_from_name(window_name(w)) == w);
  }
  CHECK_THROWS_AS(window_from_name("blackman"), InvalidArgument);
}
