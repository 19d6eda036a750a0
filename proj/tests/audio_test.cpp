#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"

#include "trem/audio.h"
#include "trem/errors.h"
#include "trem/wav.h"

#include "test_util.hpp"

using namespace trem;

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
  s.push_back(static_cast<char>((v >> 16) & 0xFF));
  s.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
}

// Hand-built WAV bytes, independent of the library writer.
std::string wav_bytes(std::uint16_t format_tag, std::uint16_t channels, std::uint32_t rate,
                      std::uint16_t bits, const std::string& payload) {
  std::string s = "RIFF";
  put_u32(s, 36 + static_cast<std::uint32_t>(payload.size()));
  s += "WAVE";
  s += "fmt ";
  put_u32(s, 16);
  put_u16(s, format_tag);
  put_u16(s, channels);
  put_u32(s, rate);
  put_u32(s, rate * channels * bits / 8);
  put_u16(s, static_cast<std::uint16_t>(channels * bits / 8));
  put_u16(s, bits);
  s += "data";
  put_u32(s, static_cast<std::uint32_t>(payload.size()));
  s += payload;
  return s;
}

}  // namespace

TEST_CASE("16-bit mono constant 16384 decodes to 0.5") {
  testutil::TempDir tmp;
  std::string payload;
  for (int i = 0; i < 100; ++i) put_u16(payload, 16384);
  testutil::write_bytes(tmp.file("c.wav"), wav_bytes(1, 1, 44100, 16, payload));

  const AudioBuffer buf = load_audio(tmp.file("c.wav"));
  REQUIRE(buf.samples.size() == 100);
  CHECK(buf.sample_rate == 44100);
  for (double v : buf.samples) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("stereo (+0.5, -0.5) mixes to silence") {
  testutil::TempDir tmp;
  std::string payload;
  for (int i = 0; i < 50; ++i) {
    put_u16(payload, 16384);
    put_u16(payload, static_cast<std::uint16_t>(-16384));
  }
  testutil::write_bytes(tmp.file("s.wav"), wav_bytes(1, 2, 48000, 16, payload));

  const AudioBuffer buf = load_audio(tmp.file("s.wav"));
  REQUIRE(buf.samples.size() == 50);
  for (double v : buf.samples) CHECK(v == 0.0);
}

TEST_CASE("one second of 44100 Hz audio reports duration 1.0") {
  testutil::TempDir tmp;
  std::string payload(44100 * 2, '\0');
  testutil::write_bytes(tmp.file("d.wav"), wav_bytes(1, 1, 44100, 16, payload));
  const AudioBuffer buf = load_audio(tmp.file("d.wav"));
  CHECK(buf.duration_s() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("24-bit and float32 payloads decode with correct scaling") {
  testutil::TempDir tmp;

  std::string p24;
  // 0x400000 = 2^22 -> 2^22 / 2^23 = 0.5
  for (int i = 0; i < 10; ++i) {
    p24.push_back('\x00');
    p24.push_back('\x00');
    p24.push_back('\x40');
  }
  testutil::write_bytes(tmp.file("a.wav"), wav_bytes(1, 1, 44100, 24, p24));
  for (double v : load_audio(tmp.file("a.wav")).samples) {
    CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  }

  std::string pf;
  const float val = -0.25f;
  for (int i = 0; i < 10; ++i) {
    std::uint32_t raw;
    std::memcpy(&raw, &val, 4);
    put_u32(pf, raw);
  }
  testutil::write_bytes(tmp.file("f.wav"), wav_bytes(3, 1, 44100, 32, pf));
  for (double v : load_audio(tmp.file("f.wav")).samples) {
    CHECK(v == doctest::Approx(-0.25).epsilon(1e-12));
  }
}

TEST_CASE("decode errors are distinct") {
  testutil::TempDir tmp;

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_audio(tmp.file("nope.wav")), FileError);
  }
  SUBCASE("unsupported codec (8-bit PCM)") {
    std::string payload(16, '\x40');
    testutil::write_bytes(tmp.file("u.wav"), wav_bytes(1, 1, 44100, 8, payload));
    CHECK_THROWS_AS(load_audio(tmp.file("u.wav")), UnsupportedFormatError);
  }
  SUBCASE("unsupported codec (mp3 tag)") {
    std::string payload(16, '\0');
    testutil::write_bytes(tmp.file("m.wav"), wav_bytes(0x0055, 1, 44100, 16, payload));
    CHECK_THROWS_AS(load_audio(tmp.file("m.wav")), UnsupportedFormatError);
  }
  SUBCASE("truncated data chunk") {
    std::string payload(64, '\0');
    std::string bytes = wav_bytes(1, 1, 44100, 16, payload);
    bytes.resize(bytes.size() - 32);  // cut the data short of its declared size
    testutil::write_bytes(tmp.file("t.wav"), bytes);
    CHECK_THROWS_AS(load_audio(tmp.file("t.wav")), TruncatedFileError);
  }
  SUBCASE("not a wav at all") {
    testutil::write_bytes(tmp.file("x.wav"), "hello world, definitely not audio");
    CHECK_THROWS_AS(load_audio(tmp.file("x.wav")), Error);
  }
  SUBCASE("nine channels") {
    std::string payload(9 * 2 * 4, '\0');
    testutil::write_bytes(tmp.file("n.wav"), wav_bytes(1, 9, 44100, 16, payload));
    CHECK_THROWS_AS(load_audio(tmp.file("n.wav")), UnsupportedFormatError);
  }
}

TEST_CASE("decoding is deterministic") {
  testutil::TempDir tmp;
  std::string payload;
  for (int i = 0; i < 256; ++i) put_u16(payload, static_cast<std::uint16_t>(i * 97 + 13));
  testutil::write_bytes(tmp.file("r.wav"), wav_bytes(1, 1, 32000, 16, payload));
  const AudioBuffer a = load_audio(tmp.file("r.wav"));
  const AudioBuffer b = load_audio(tmp.file("r.wav"));
  CHECK(a.samples == b.samples);
  CHECK(a.sample_rate == b.sample_rate);
}

TEST_CASE("frame counts follow floor((N - frame) / hop) + 1") {
  AudioBuffer buf;
  buf.sample_rate = 44100;

  buf.samples.assign(4096, 0.0);
  CHECK(frame_signal(buf, 2048, 512).count() == 5);

  buf.samples.assign(2048, 0.0);
  CHECK(frame_signal(buf, 2048, 512).count() == 1);

  buf.samples.assign(2047, 0.0);
  CHECK_THROWS_AS(frame_signal(buf, 2048, 512), InvalidArgument);
}

TEST_CASE("framing is shift-consistent and timestamps step by hop") {
  AudioBuffer buf;
  buf.sample_rate = 8000;
  buf.samples.resize(4000);
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    buf.samples[i] = std::sin(0.01 * static_cast<double>(i));
  }

  AudioBuffer delayed;
  delayed.sample_rate = 8000;
  const int hop = 160;
  delayed.samples.assign(buf.samples.begin() + hop, buf.samples.end());

  const FrameSequence a = frame_signal(buf, 640, hop);
  const FrameSequence b = frame_signal(delayed, 640, hop);
  REQUIRE(a.count() >= b.count());
  for (std::size_t i = 1; i < a.count(); ++i) {
    const auto fa = a.frame(i);
    const auto fb = b.frame(i - 1);
    for (std::size_t k = 0; k < fa.size(); ++k) REQUIRE(fa[k] == fb[k]);
    CHECK(a.timestamp(i) - a.timestamp(i - 1) ==
          doctest::Approx(static_cast<double>(hop) / 8000.0).epsilon(1e-12));
  }
}

TEST_CASE("wav writer round-trips") {
  testutil::TempDir tmp;
  std::vector<double> samples(500);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = 0.8 * std::sin(0.05 * static_cast<double>(i));
  }

  write_wav(tmp.file("f32.wav"), samples, 22050, WavSampleFormat::float32);
  const AudioBuffer f32 = load_audio(tmp.file("f32.wav"));
  REQUIRE(f32.samples.size() == samples.size());
  CHECK(f32.sample_rate == 22050);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(f32.samples[i] == doctest::Approx(samples[i]).epsilon(1e-7));
  }

  write_wav(tmp.file("p16.wav"), samples, 22050, WavSampleFormat::pcm16);
  const AudioBuffer p16 = load_audio(tmp.file("p16.wav"));
  REQUIRE(p16.samples.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(std::abs(p16.samples[i] - samples[i]) <= 0.5 / 32768.0 + 1e-9);
  }
}
