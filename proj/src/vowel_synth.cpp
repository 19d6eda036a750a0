#include "trem/vowel_synth.h"

#include <cmath>
#include <numbers>
#include <random>

#include "trem/errors.h"

namespace trem {

namespace {

constexpr double kGainFloor = 1e-3;  // -60 dB
constexpr double kDefaultHop = 512.0;  // feature-rate reference for the rate bound

// Uniform double in [-1, 1) from raw engine bits; unlike
// std::uniform_real_distribution this is identical on every platform.
double uniform_pm1(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

// Paul Kellet's 3-tap pink filter refinement over white noise.
class PinkNoise {
 public:
  explicit PinkNoise(std::uint64_t seed) : rng_(seed) {}

  double next() {
    const double w = uniform_pm1(rng_);
    b0_ = 0.99886 * b0_ + w * 0.0555179;
    b1_ = 0.99332 * b1_ + w * 0.0750759;
    b2_ = 0.96900 * b2_ + w * 0.1538520;
    b3_ = 0.86650 * b3_ + w * 0.3104856;
    b4_ = 0.55000 * b4_ + w * 0.5329522;
    b5_ = -0.7616 * b5_ - w * 0.0168980;
    const double pink = b0_ + b1_ + b2_ + b3_ + b4_ + b5_ + b6_ + w * 0.5362;
    b6_ = w * 0.115926;
    return pink * 0.11;
  }

 private:
  std::mt19937_64 rng_;
  double b0_ = 0, b1_ = 0, b2_ = 0, b3_ = 0, b4_ = 0, b5_ = 0, b6_ = 0;
};

void validate_vowel(const VowelSpec& v, const char* field, int sample_rate) {
  if (v.formants.empty()) {
    throw InvalidArgument(std::string("tremolo spec: ") + field + " has no formants");
  }
  for (const Formant& f : v.formants) {
    if (!(f.center_hz > 0.0) || f.center_hz >= sample_rate / 2.0) {
      throw InvalidArgument(std::string("tremolo spec: ") + field +
                            " formant center must be in (0, Nyquist)");
    }
    if (!(f.bandwidth_hz > 0.0)) {
      throw InvalidArgument(std::string("tremolo spec: ") + field +
                            " formant bandwidth must be positive");
    }
    if (!(f.gain > 0.0)) {
      throw InvalidArgument(std::string("tremolo spec: ") + field +
                            " formant gain must be positive");
    }
  }
}

}  // namespace

VowelSpec builtin_vowel(std::string_view name) {
  if (name == "i") return {"i", {{270.0, 60.0, 1.0}, {2290.0, 90.0, 0.3}}};
  if (name == "e") return {"e", {{530.0, 70.0, 1.0}, {1840.0, 100.0, 0.35}}};
  if (name == "o") return {"o", {{570.0, 80.0, 1.0}, {840.0, 80.0, 0.5}}};
  throw InvalidArgument("unknown built-in vowel '" + std::string(name) +
                        "' (expected i, e or o)");
}

void TremoloSpec::validate(int sample_rate) const {
  if (sample_rate <= 0) throw InvalidArgument("tremolo spec: sample_rate must be positive");
  if (!(f0_hz > 0.0) || f0_hz >= sample_rate / 2.0) {
    throw InvalidArgument("tremolo spec: f0_hz must be in (0, Nyquist)");
  }
  const double feature_rate = sample_rate / kDefaultHop;
  if (!(rate_hz > 0.0) || !(rate_hz < feature_rate / 4.0)) {
    throw InvalidArgument("tremolo spec: rate_hz must be in (0, feature_rate / 4)");
  }
  if (!(duration_s > 4.0 / rate_hz)) {
    throw InvalidArgument("tremolo spec: duration_s must exceed 4 / rate_hz");
  }
  if (std::isnan(background_db)) throw InvalidArgument("tremolo spec: background_db is NaN");
  if (!(pitch_wobble_cents >= 0.0)) {
    throw InvalidArgument("tremolo spec: pitch_wobble_cents must be >= 0");
  }
  validate_vowel(vowel_a, "vowel_a", sample_rate);
  validate_vowel(vowel_b, "vowel_b", sample_rate);
}

double formant_gain(int h, double f0, const VowelSpec& vowel) {
  if (h < 1) throw InvalidArgument("formant_gain: harmonic index must be >= 1");
  const double f = h * f0;
  double gain = 0.0;
  for (const Formant& fm : vowel.formants) {
    const double x = (f - fm.center_hz) / (fm.bandwidth_hz / 2.0);
    gain += fm.gain / (1.0 + x * x);
  }
  return std::max(gain, kGainFloor);
}

AudioBuffer synthesize_tremolo(const TremoloSpec& spec, int sample_rate, std::uint64_t seed) {
  spec.validate(sample_rate);

  const double nyquist = sample_rate / 2.0;
  const double wobble_up = std::exp2(spec.pitch_wobble_cents / 2.0 / 1200.0);
  int max_h = 0;
  while (max_h < 20 && (max_h + 1) * spec.f0_hz * wobble_up < 0.98 * nyquist) ++max_h;
  if (max_h < 1) throw InvalidArgument("tremolo spec: f0_hz leaves no harmonics below Nyquist");

  std::vector<double> gain_a(max_h), gain_b(max_h);
  for (int h = 1; h <= max_h; ++h) {
    gain_a[h - 1] = formant_gain(h, spec.f0_hz, spec.vowel_a);
    gain_b[h - 1] = formant_gain(h, spec.f0_hz, spec.vowel_b);
  }

  const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration_s * sample_rate));
  AudioBuffer buf;
  buf.sample_rate = sample_rate;
  buf.samples.resize(n);

  const double two_pi = 2.0 * std::numbers::pi;
  double phase = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    // Raised-cosine modulator: 0 = vowel A, 1 = vowel B, one full
    // A->B->A alternation per 1/rate_hz.
    const double mod = 0.5 * (1.0 - std::cos(two_pi * spec.rate_hz * t / sample_rate));
    const double cents = spec.pitch_wobble_cents * (0.5 - mod);
    const double f0_t = spec.f0_hz * std::exp2(cents / 1200.0);
    phase += two_pi * f0_t / sample_rate;
    if (phase > two_pi) phase -= two_pi;

    double s = 0.0;
    for (int h = 1; h <= max_h; ++h) {
      const double g = (1.0 - mod) * gain_a[h - 1] + mod * gain_b[h - 1];
      s += g * std::sin(h * phase);
    }
    buf.samples[t] = s;
  }

  double voice_sq = 0.0;
  for (double v : buf.samples) voice_sq += v * v;
  const double voice_rms = std::sqrt(voice_sq / static_cast<double>(n));

  if (std::isfinite(spec.background_db) && voice_rms > 0.0) {
    PinkNoise noise(seed);
    std::vector<double> bg(n);
    double bg_sq = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      bg[t] = noise.next();
      bg_sq += bg[t] * bg[t];
    }
    const double bg_rms = std::sqrt(bg_sq / static_cast<double>(n));
    if (bg_rms > 0.0) {
      const double scale = voice_rms * std::pow(10.0, spec.background_db / 20.0) / bg_rms;
      for (std::size_t t = 0; t < n; ++t) buf.samples[t] += scale * bg[t];
    }
  }

  double peak = 0.0;
  for (double v : buf.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double scale = 0.9 / peak;
    for (double& v : buf.samples) v *= scale;
  }
  return buf;
}

namespace {

nlohmann::json vowel_to_json(const VowelSpec& v) {
  nlohmann::json formants = nlohmann::json::array();
  for (const Formant& f : v.formants) {
    formants.push_back({f.center_hz, f.bandwidth_hz, f.gain});
  }
  return {{"name", v.name}, {"formants", formants}};
}

VowelSpec vowel_from_json(const nlohmann::json& j, const char* field) {
  try {
    if (j.is_string()) return builtin_vowel(j.get<std::string>());
    VowelSpec v;
    v.name = j.value("name", "custom");
    if (!j.contains("formants")) {
      return builtin_vowel(v.name);  // {"name": "i"} form
    }
    for (const auto& f : j.at("formants")) {
      v.formants.push_back({f.at(0).get<double>(), f.at(1).get<double>(), f.at(2).get<double>()});
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("tremolo spec: bad ") + field + ": " + e.what());
  }
}

}  // namespace

nlohmann::json tremolo_spec_to_json(const TremoloSpec& spec) {
  nlohmann::json j{
      {"f0_hz", spec.f0_hz},
      {"vowel_a", vowel_to_json(spec.vowel_a)},
      {"vowel_b", vowel_to_json(spec.vowel_b)},
      {"rate_hz", spec.rate_hz},
      {"duration_s", spec.duration_s},
      {"pitch_wobble_cents", spec.pitch_wobble_cents},
  };
  if (std::isfinite(spec.background_db)) {
    j["background_db"] = spec.background_db;
  } else {
    j["background_db"] = nullptr;  // none
  }
  return j;
}

TremoloSpec tremolo_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("tremolo spec: expected a JSON object");
  TremoloSpec spec;
  auto get_num = [&](const char* field, double fallback, bool required) {
    if (!j.contains(field)) {
      if (required) throw InvalidArgument(std::string("tremolo spec: missing field ") + field);
      return fallback;
    }
    if (!j.at(field).is_number()) {
      throw InvalidArgument(std::string("tremolo spec: ") + field + " must be a number");
    }
    return j.at(field).get<double>();
  };
  spec.f0_hz = get_num("f0_hz", 0.0, true);
  spec.rate_hz = get_num("rate_hz", 0.0, true);
  spec.duration_s = get_num("duration_s", 0.0, true);
  spec.pitch_wobble_cents = get_num("pitch_wobble_cents", 20.0, false);
  if (j.contains("background_db") && !j.at("background_db").is_null()) {
    spec.background_db = get_num("background_db", 0.0, false);
  }
  if (!j.contains("vowel_a")) throw InvalidArgument("tremolo spec: missing field vowel_a");
  if (!j.contains("vowel_b")) throw InvalidArgument("tremolo spec: missing field vowel_b");
  spec.vowel_a = vowel_from_json(j.at("vowel_a"), "vowel_a");
  spec.vowel_b = vowel_from_json(j.at("vowel_b"), "vowel_b");

  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"f0_hz",       "rate_hz",  "duration_s", "pitch_wobble_cents",
                                  "background_db", "vowel_a", "vowel_b"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InvalidArgument("tremolo spec: unknown field '" + key + "'");
  }
  return spec;
}

}  // namespace trem
