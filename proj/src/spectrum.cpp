#include "trem/spectrum.h"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "trem/errors.h"

namespace trem {

namespace {

// FFTW planner calls are not thread-safe; execution of private plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Window window_from_name(std::string_view name) {
  if (name == "hann") return Window::hann;
  if (name == "hamming") return Window::hamming;
  if (name == "rectangular") return Window::rectangular;
  throw InvalidArgument("unknown window '" + std::string(name) +
                        "' (expected hann, hamming or rectangular)");
}

std::string_view window_name(Window w) {
  switch (w) {
    case Window::hann: return "hann";
    case Window::hamming: return "hamming";
    case Window::rectangular: return "rectangular";
  }
  return "?";
}

std::vector<double> make_window(Window w, int n) {
  std::vector<double> win(static_cast<std::size_t>(n), 1.0);
  const double step = 2.0 * std::numbers::pi / n;  // periodic form
  switch (w) {
    case Window::hann:
      for (int i = 0; i < n; ++i) win[i] = 0.5 - 0.5 * std::cos(step * i);
      break;
    case Window::hamming:
      for (int i = 0; i < n; ++i) win[i] = 0.54 - 0.46 * std::cos(step * i);
      break;
    case Window::rectangular:
      break;
  }
  return win;
}

struct SpectrumAnalyzer::Plan {
  fftw_plan plan = nullptr;
  double* in = nullptr;
  fftw_complex* out = nullptr;

  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

SpectrumAnalyzer::SpectrumAnalyzer(int frame_size, int sample_rate, Window window)
    : plan_(std::make_unique<Plan>()),
      frame_size_(frame_size),
      sample_rate_(sample_rate),
      window_kind_(window) {
  if (!is_power_of_two(frame_size) || frame_size < 4) {
    throw InvalidArgument("spectrum: frame size must be a power of two >= 4, got " +
                          std::to_string(frame_size));
  }
  if (sample_rate <= 0) throw InvalidArgument("spectrum: sample_rate must be positive");

  window_ = make_window(window, frame_size);
  window_sum_ = 0.0;
  window_sq_sum_ = 0.0;
  for (double w : window_) {
    window_sum_ += w;
    window_sq_sum_ += w * w;
  }

  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_->in = fftw_alloc_real(static_cast<std::size_t>(frame_size));
  plan_->out = fftw_alloc_complex(static_cast<std::size_t>(frame_size) / 2 + 1);
  plan_->plan = fftw_plan_dft_r2c_1d(frame_size, plan_->in, plan_->out, FFTW_ESTIMATE);
  if (!plan_->plan) throw Error("spectrum: FFT plan creation failed");
}

SpectrumAnalyzer::~SpectrumAnalyzer() = default;

Spectrum SpectrumAnalyzer::analyze(std::span<const double> frame, double frame_time) {
  if (frame.size() != static_cast<std::size_t>(frame_size_)) {
    throw InvalidArgument("spectrum: frame length " + std::to_string(frame.size()) +
                          " does not match analyzer size " + std::to_string(frame_size_));
  }
  for (int i = 0; i < frame_size_; ++i) plan_->in[i] = frame[i] * window_[i];
  fftw_execute(plan_->plan);

  const std::size_t bins = static_cast<std::size_t>(frame_size_) / 2 + 1;
  Spectrum spec;
  spec.magnitudes.resize(bins);
  spec.bin_hz = static_cast<double>(sample_rate_) / frame_size_;
  spec.frame_time = frame_time;
  spec.frame_size = frame_size_;
  spec.window = window_kind_;
  spec.window_sum = window_sum_;
  spec.window_sq_sum = window_sq_sum_;

  const double interior_gain = 2.0 / window_sum_;
  const double edge_gain = 1.0 / window_sum_;
  for (std::size_t b = 0; b < bins; ++b) {
    const double re = plan_->out[b][0];
    const double im = plan_->out[b][1];
    const double gain = (b == 0 || b == bins - 1) ? edge_gain : interior_gain;
    spec.magnitudes[b] = std::hypot(re, im) * gain;
  }
  return spec;
}

Spectrum spectrum_of_frame(std::span<const double> frame, int sample_rate, Window window,
                           double frame_time) {
  SpectrumAnalyzer analyzer(static_cast<int>(frame.size()), sample_rate, window);
  return analyzer.analyze(frame, frame_time);
}

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}

}  // namespace

double window_mainlobe_response(Window w, double offset_bins) {
  // Cosine-sum windows w[n] = a0 - a1 cos(2 pi n / N) have mainlobe
  // W(d) = a0 sinc(d) + (a1/2) (sinc(d-1) + sinc(d+1)) up to a phase,
  // normalized here by W(0) = a0.
  double a0 = 1.0, a1 = 0.0;
  switch (w) {
    case Window::hann: a0 = 0.5; a1 = 0.5; break;
    case Window::hamming: a0 = 0.54; a1 = 0.46; break;
    case Window::rectangular: break;
  }
  const double d = offset_bins;
  const double response = a0 * sinc(d) + 0.5 * a1 * (sinc(d - 1.0) + sinc(d + 1.0));
  return std::abs(response) / a0;
}

}  // namespace trem
