#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace trem {

/// Decoded mono sample stream. Samples are finite and within [-1, 1]
/// after decode normalization.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Overlapping frame decomposition of an AudioBuffer. Frames are views into
/// the buffer; the buffer must outlive the sequence. A trailing partial
/// frame is discarded: count = floor((N - frame_size) / hop_size) + 1.
class FrameSequence {
 public:
  FrameSequence(const AudioBuffer& buf, int frame_size, int hop_size);

  std::size_t count() const { return count_; }
  int frame_size() const { return frame_size_; }
  int hop_size() const { return hop_size_; }
  int sample_rate() const { return sample_rate_; }
  double frame_rate() const { return static_cast<double>(sample_rate_) / hop_size_; }

  std::span<const double> frame(std::size_t i) const;

  /// Frame-center timestamp in seconds: (i * hop + frame_size / 2) / sr.
  double timestamp(std::size_t i) const;

 private:
  const std::vector<double>* samples_;
  int frame_size_;
  int hop_size_;
  int sample_rate_;
  std::size_t count_;
};

/// Cuts a buffer into overlapping frames.
/// Throws InvalidArgument if the buffer is shorter than one frame or
/// hop_size < 1.
FrameSequence frame_signal(const AudioBuffer& buf, int frame_size, int hop_size);

}  // namespace trem
