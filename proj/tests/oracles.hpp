// Independent reference implementations used as test oracles. Everything
// here is deliberately written as straight-line summation from the defining
// formulas, sharing no code with the library paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Deterministic RNG helpers
// ---------------------------------------------------------------------------

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) / 9007199254740992.0;  // [0, 1)
  return lo + (hi - lo) * u;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo,
                                         double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform(rng, lo, hi);
  return v;
}

// ---------------------------------------------------------------------------
// Naive DFT magnitude (direct O(N^2) summation)
// ---------------------------------------------------------------------------

// One-sided magnitudes with the same peak-normalized convention the library
// documents: interior bins scaled by 2/S1, edges by 1/S1.
inline std::vector<double> dft_magnitudes(std::span<const double> frame,
                                          std::span<const double> window) {
  const std::size_t n = frame.size();
  const std::size_t bins = n / 2 + 1;
  double s1 = 0.0;
  for (double w : window) s1 += w;
  std::vector<double> mags(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(b) *
                           static_cast<double>(t) / static_cast<double>(n);
      const double x = frame[t] * window[t];
      re += x * std::cos(angle);
      im += x * std::sin(angle);
    }
    const double gain = (b == 0 || b == bins - 1) ? 1.0 / s1 : 2.0 / s1;
    mags[b] = std::sqrt(re * re + im * im) * gain;
  }
  return mags;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver for symmetric matrices
// ---------------------------------------------------------------------------

struct JacobiResult {
  std::vector<double> eigenvalues;   // descending
  std::vector<double> eigenvectors;  // n x n row-major, column j = vector j
  std::size_t n = 0;
};

// Classic cyclic-by-row Jacobi rotations until the off-diagonal mass is
// negligible. Applies the same deterministic sign convention as the library
// (largest-magnitude entry positive) so results are directly comparable.
inline JacobiResult jacobi_eigen(std::vector<double> a, std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_diagonal = [&]() {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) s += a[p * n + q] * a[p * n + q];
    }
    return s;
  };

  double scale = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(a[i]));
  const double tol = 1e-30 * std::max(1.0, scale * scale);

  for (int sweep = 0; sweep < 200 && off_diagonal() > tol; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a[x * n + x] > a[y * n + y];
  });

  JacobiResult res;
  res.n = n;
  res.eigenvalues.resize(n);
  res.eigenvectors.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    res.eigenvalues[j] = std::max(0.0, a[order[j] * n + order[j]]);
    std::size_t max_k = 0;
    double max_abs = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double entry = std::abs(v[k * n + order[j]]);
      if (entry > max_abs) {
        max_abs = entry;
        max_k = k;
      }
    }
    const double sign = v[max_k * n + order[j]] < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      res.eigenvectors[k * n + j] = sign * v[k * n + order[j]];
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Direct-summation descriptor formulas
// ---------------------------------------------------------------------------

struct Moments {
  double centroid, spread, skewness, kurtosis;
};

inline Moments moments(std::span<const double> w, std::span<const double> x) {
  double total = 0.0;
  for (double v : w) total += v;
  if (total <= 0.0) return {0.0, 0.0, 0.0, 3.0};
  double mu = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) mu += w[i] / total * x[i];
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double p = w[i] / total;
    m2 += p * std::pow(x[i] - mu, 2.0);
    m3 += p * std::pow(x[i] - mu, 3.0);
    m4 += p * std::pow(x[i] - mu, 4.0);
  }
  const double sigma = std::sqrt(m2);
  if (sigma == 0.0) return {mu, 0.0, 0.0, 3.0};
  return {mu, sigma, m3 / std::pow(sigma, 3.0), m4 / std::pow(sigma, 4.0)};
}

inline double slope(std::span<const double> w, std::span<const double> x) {
  const double n = static_cast<double>(w.size());
  double sw = 0.0, sx = 0.0, sxx = 0.0, sxw = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    sx += x[i];
    sxx += x[i] * x[i];
    sxw += x[i] * w[i];
  }
  if (sw <= 0.0 || w.size() < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (n * sxw - sx * sw) / denom / sw;
}

inline double decrease(std::span<const double> w) {
  if (w.size() < 2) return 0.0;
  double acc = 0.0, tail = 0.0;
  for (std::size_t b = 1; b < w.size(); ++b) {
    acc += (w[b] - w[0]) / static_cast<double>(b);
    tail += w[b];
  }
  return tail > 0.0 ? acc / tail : 0.0;
}

inline double rolloff(std::span<const double> w, std::span<const double> x) {
  double energy = 0.0;
  for (double v : w) energy += v * v;
  if (energy <= 0.0) return 0.0;
  double cum = 0.0;
  for (std::size_t b = 0; b < w.size(); ++b) {
    cum += w[b] * w[b];
    if (cum >= 0.95 * energy) return x[b];
  }
  return x.back();
}

inline double variation(std::span<const double> w, std::span<const double> prev) {
  if (prev.empty()) return 0.0;
  const std::size_t m = std::max(w.size(), prev.size());
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = i < w.size() ? w[i] : 0.0;
    const double b = i < prev.size() ? prev[i] : 0.0;
    dot += a * b;
    na += a * a;
    nb += b * b;
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

struct Tristimulus {
  double t1, t2, t3;
};

inline Tristimulus tristimulus(std::span<const double> a) {
  double total = 0.0;
  for (double v : a) total += v;
  if (total <= 0.0) return {0.0, 0.0, 0.0};
  const double a1 = a.size() > 0 ? a[0] : 0.0;
  double mid = 0.0;
  for (std::size_t h = 1; h < a.size() && h < 4; ++h) mid += a[h];
  double high = 0.0;
  for (std::size_t h = 4; h < a.size(); ++h) high += a[h];
  return {a1 / total, mid / total, high / total};
}

inline double odd_even(std::span<const double> a, double cap) {
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((i + 1) % 2 == 1) {
      odd += a[i] * a[i];
    } else {
      even += a[i] * a[i];
    }
  }
  if (even == 0.0) return odd > 0.0 ? cap : 0.0;
  return std::min(odd / even, cap);
}

inline double deviation(std::span<const double> a) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double env;
    if (i == 0) {
      env = (a[0] + a[1]) / 2.0;
    } else if (i == n - 1) {
      env = (a[n - 2] + a[n - 1]) / 2.0;
    } else {
      env = (a[i - 1] + a[i] + a[i + 1]) / 3.0;
    }
    acc += std::abs(a[i] - env);
  }
  return acc / static_cast<double>(n);
}

struct FlatnessCrest {
  double flatness, crest;
};

inline FlatnessCrest flatness_crest(std::span<const double> powers) {
  if (powers.empty()) return {1.0, 1.0};
  double sum = 0.0, max_p = 0.0;
  for (double p : powers) {
    sum += p;
    max_p = std::max(max_p, p);
  }
  if (sum <= 0.0) return {1.0, 1.0};
  const double mean = sum / static_cast<double>(powers.size());
  double geo = 1.0;
  for (double p : powers) geo *= std::pow(p, 1.0 / static_cast<double>(powers.size()));
  return {geo / mean, max_p / mean};
}

inline double zero_crossing_rate(std::span<const double> frame, int sample_rate) {
  std::size_t count = 0;
  for (std::size_t i = 1; i < frame.size(); ++i) {
    if (frame[i - 1] * frame[i] < 0.0) ++count;
  }
  return static_cast<double>(count) * sample_rate / static_cast<double>(frame.size());
}

// ---------------------------------------------------------------------------
// Signal generators
// ---------------------------------------------------------------------------

inline std::vector<double> sine(double freq, double amp, int sample_rate, std::size_t n,
                                double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t) / sample_rate +
                          phase);
  }
  return x;
}

inline std::vector<double> sawtooth(double freq, int sample_rate, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double phase = std::fmod(freq * static_cast<double>(t) / sample_rate, 1.0);
    x[t] = 2.0 * phase - 1.0;
  }
  return x;
}

// Additive harmonic tone with given per-harmonic amplitudes.
inline std::vector<double> additive(double f0, std::span<const double> amps, int sample_rate,
                                    std::size_t n) {
  std::vector<double> x(n, 0.0);
  for (std::size_t h = 0; h < amps.size(); ++h) {
    for (std::size_t t = 0; t < n; ++t) {
      x[t] += amps[h] * std::sin(2.0 * std::numbers::pi * f0 * static_cast<double>(h + 1) *
                                 static_cast<double>(t) / sample_rate);
    }
  }
  return x;
}

// Largest nonzero-frequency DFT component of a series, in Hz.
inline double dominant_frequency(std::span<const double> series, double rate) {
  const std::size_t n = series.size();
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double best_mag = -1.0;
  std::size_t best_k = 1;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(t) / static_cast<double>(n);
      re += (series[t] - mean) * std::cos(angle);
      im += (series[t] - mean) * std::sin(angle);
    }
    const double mag = re * re + im * im;
    if (mag > best_mag) {
      best_mag = mag;
      best_k = k;
    }
  }
  return static_cast<double>(best_k) * rate / static_cast<double>(n);
}

}  // namespace oracle
