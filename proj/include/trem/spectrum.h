#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace trem {

enum class Window { hann, hamming, rectangular };

Window window_from_name(std::string_view name);  // throws InvalidArgument
std::string_view window_name(Window w);
std::vector<double> make_window(Window w, int n);

/// One-sided magnitude spectrum on a linear magnitude / linear frequency
/// grid, frame_size/2 + 1 bins from DC to Nyquist.
///
/// Normalization convention: magnitudes[b] = g_b * |X[b]| with
/// g_b = 2 / S1 for interior bins and 1 / S1 at DC and Nyquist, where
/// S1 = sum of window samples. A full-scale sinusoid at a bin center then
/// peaks at magnitude 1.0 for any window.
///
/// Parseval identity under this convention:
///   sum_n (x[n] w[n])^2 = (S1^2 / N) * (m_0^2 + m_{N/2}^2 + 1/2 * sum_int m_b^2)
/// where m_b = magnitudes[b] and "int" ranges over interior bins.
struct Spectrum {
  std::vector<double> magnitudes;
  double bin_hz = 0.0;       // sample_rate / frame_size
  double frame_time = 0.0;   // seconds, frame center
  int frame_size = 0;        // N
  Window window = Window::hann;
  double window_sum = 0.0;   // S1 = sum w[n]
  double window_sq_sum = 0.0;  // S2 = sum w[n]^2

  std::size_t size() const { return magnitudes.size(); }
  double bin_freq(std::size_t b) const { return static_cast<double>(b) * bin_hz; }
  double nyquist() const { return bin_freq(size() - 1); }
};

/// Computes magnitude spectra of power-of-two frames. Owns the FFT plan and
/// scratch buffers, so one instance per thread; distinct instances may run
/// concurrently.
class SpectrumAnalyzer {
 public:
  /// Throws InvalidArgument unless frame_size is a power of two >= 4.
  SpectrumAnalyzer(int frame_size, int sample_rate, Window window);
  ~SpectrumAnalyzer();

  SpectrumAnalyzer(const SpectrumAnalyzer&) = delete;
  SpectrumAnalyzer& operator=(const SpectrumAnalyzer&) = delete;

  int frame_size() const { return frame_size_; }

  Spectrum analyze(std::span<const double> frame, double frame_time);

 private:
  struct Plan;
  std::unique_ptr<Plan> plan_;
  std::vector<double> window_;
  int frame_size_;
  int sample_rate_;
  Window window_kind_;
  double window_sum_;
  double window_sq_sum_;
};

/// One-shot convenience wrapper around SpectrumAnalyzer.
Spectrum spectrum_of_frame(std::span<const double> frame, int sample_rate, Window window,
                           double frame_time = 0.0);

/// Normalized mainlobe magnitude response of a window at a fractional bin
/// offset: the factor by which an off-center sinusoid's peak bin is
/// attenuated (1 at offset 0). Used to de-bias interpolated peak amplitudes.
double window_mainlobe_response(Window w, double offset_bins);

}  // namespace trem
