#include "trem/audio.h"

#include "trem/errors.h"

namespace trem {

FrameSequence::FrameSequence(const AudioBuffer& buf, int frame_size, int hop_size)
    : samples_(&buf.samples),
      frame_size_(frame_size),
      hop_size_(hop_size),
      sample_rate_(buf.sample_rate) {
  const std::size_t n = samples_->size();
  count_ = (n >= static_cast<std::size_t>(frame_size_))
               ? (n - frame_size_) / hop_size_ + 1
               : 0;
}

std::span<const double> FrameSequence::frame(std::size_t i) const {
  return {samples_->data() + i * hop_size_, static_cast<std::size_t>(frame_size_)};
}

double FrameSequence::timestamp(std::size_t i) const {
  return (static_cast<double>(i) * hop_size_ + frame_size_ / 2.0) / sample_rate_;
}

FrameSequence frame_signal(const AudioBuffer& buf, int frame_size, int hop_size) {
  if (frame_size < 1) throw InvalidArgument("frame_signal: frame_size must be >= 1");
  if (hop_size < 1) throw InvalidArgument("frame_signal: hop_size must be >= 1");
  if (hop_size > frame_size) throw InvalidArgument("frame_signal: hop_size must be <= frame_size");
  if (buf.sample_rate <= 0) throw InvalidArgument("frame_signal: sample_rate must be positive");
  if (buf.samples.size() < static_cast<std::size_t>(frame_size)) {
    throw InvalidArgument("frame_signal: buffer shorter than one frame");
  }
  return FrameSequence(buf, frame_size, hop_size);
}

}  // namespace trem
