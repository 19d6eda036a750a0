#include "trem/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "trem/errors.h"

namespace trem {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatIeeeFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
};

}  // namespace

AudioBuffer load_audio(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open file: " + path.string());

  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12) throw TruncatedFileError("not a RIFF/WAVE file (too short): " + path.string());
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw UnsupportedFormatError("not a RIFF/WAVE file: " + path.string());
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t chunk_len = read_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_len > bytes.size()) {
      throw TruncatedFileError("chunk '" + std::string(id, 4) + "' exceeds file size: " +
                               path.string());
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw TruncatedFileError("fmt chunk too short: " + path.string());
      const unsigned char* p = bytes.data() + body;
      fmt.format = read_u16(p);
      fmt.channels = read_u16(p + 2);
      fmt.sample_rate = read_u32(p + 4);
      fmt.bits_per_sample = read_u16(p + 14);
      if (fmt.format == kFormatExtensible) {
        // Sub-format GUID starts with the effective format tag.
        if (chunk_len < 40) throw TruncatedFileError("extensible fmt chunk too short: " + path.string());
        fmt.format = read_u16(p + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw TruncatedFileError("missing fmt chunk: " + path.string());
  if (data == nullptr) throw TruncatedFileError("missing data chunk: " + path.string());
  if (fmt.channels < 1 || fmt.channels > 8) {
    throw UnsupportedFormatError("unsupported channel count " + std::to_string(fmt.channels) +
                                 ": " + path.string());
  }
  if (fmt.sample_rate == 0) throw UnsupportedFormatError("zero sample rate: " + path.string());

  int bytes_per_sample = 0;
  if (fmt.format == kFormatPcm && fmt.bits_per_sample == 16) {
    bytes_per_sample = 2;
  } else if (fmt.format == kFormatPcm && fmt.bits_per_sample == 24) {
    bytes_per_sample = 3;
  } else if (fmt.format == kFormatIeeeFloat && fmt.bits_per_sample == 32) {
    bytes_per_sample = 4;
  } else {
    throw UnsupportedFormatError("unsupported codec (format tag " + std::to_string(fmt.format) +
                                 ", " + std::to_string(fmt.bits_per_sample) + " bit): " +
                                 path.string());
  }

  const std::size_t stride = static_cast<std::size_t>(bytes_per_sample) * fmt.channels;
  const std::size_t n_frames = data_len / stride;
  if (n_frames * stride != data_len) {
    throw TruncatedFileError("data chunk not a whole number of frames: " + path.string());
  }

  AudioBuffer buf;
  buf.sample_rate = static_cast<int>(fmt.sample_rate);
  buf.samples.resize(n_frames);

  const double inv_channels = 1.0 / fmt.channels;
  for (std::size_t i = 0; i < n_frames; ++i) {
    const unsigned char* frame = data + i * stride;
    double acc = 0.0;
    for (int c = 0; c < fmt.channels; ++c) {
      const unsigned char* s = frame + static_cast<std::size_t>(c) * bytes_per_sample;
      double v = 0.0;
      if (bytes_per_sample == 2) {
        const auto raw = static_cast<std::int16_t>(s[0] | (s[1] << 8));
        v = raw / 32768.0;
      } else if (bytes_per_sample == 3) {
        std::int32_t raw = s[0] | (s[1] << 8) | (s[2] << 16);
        if (raw & 0x800000) raw |= ~0xFFFFFF;  // sign extend
        v = raw / 8388608.0;
      } else {
        float f;
        std::memcpy(&f, s, 4);
        v = f;
      }
      acc += v;
    }
    buf.samples[i] = std::clamp(acc * inv_channels, -1.0, 1.0);
  }
  return buf;
}

namespace {

void append_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void append_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace

void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               int sample_rate, WavSampleFormat format) {
  if (sample_rate <= 0) throw InvalidArgument("write_wav: sample_rate must be positive");

  const bool pcm16 = format == WavSampleFormat::pcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const std::uint16_t tag = pcm16 ? kFormatPcm : kFormatIeeeFloat;
  const std::uint32_t bytes_per = bits / 8;
  const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * bytes_per);

  std::string out;
  out.reserve(44 + data_len);
  out.append("RIFF");
  append_u32(out, 36 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  append_u32(out, 16);
  append_u16(out, tag);
  append_u16(out, 1);  // mono
  append_u32(out, static_cast<std::uint32_t>(sample_rate));
  append_u32(out, static_cast<std::uint32_t>(sample_rate) * bytes_per);
  append_u16(out, static_cast<std::uint16_t>(bytes_per));
  append_u16(out, bits);
  out.append("data");
  append_u32(out, data_len);

  for (double v : samples) {
    if (pcm16) {
      // Same 2^15 scale the decoder divides by; +1.0 clips to 32767.
      const long q = std::clamp<long>(std::lrint(v * 32768.0), -32768, 32767);
      append_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      const float f = static_cast<float>(v);
      std::uint32_t raw;
      std::memcpy(&raw, &f, 4);
      append_u32(out, raw);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FileError("cannot open for writing: " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw FileError("write failed: " + path.string());
}

}  // namespace trem
