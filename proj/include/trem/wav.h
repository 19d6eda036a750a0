#pragma once

#include <filesystem>
#include <span>

#include "trem/audio.h"

namespace trem {

/// Decodes a RIFF/WAVE file (16/24-bit integer or 32-bit float PCM,
/// 1..8 channels) and mixes to mono by arithmetic channel mean.
/// Integer samples are scaled by the fixed 2^(bits-1) factor.
///
/// Throws FileError (missing/unreadable), UnsupportedFormatError
/// (non-PCM codec, unhandled bit depth or channel count) or
/// TruncatedFileError (file shorter than its headers declare).
AudioBuffer load_audio(const std::filesystem::path& path);

enum class WavSampleFormat { pcm16, float32 };

/// Writes mono samples as a WAV file. pcm16 clamps to [-1, 1] and rounds;
/// float32 stores values verbatim. Output is byte-deterministic.
void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               int sample_rate, WavSampleFormat format = WavSampleFormat::pcm16);

}  // namespace trem
