#include "moments/frame_source.hpp"

#include <algorithm>

namespace moments {

MemoryFrameSource::MemoryFrameSource(VideoMeta meta, std::vector<GrayFrame> frames)
    : meta_(std::move(meta)), frames_(std::move(frames)) {
  meta_.frame_count = static_cast<std::int64_t>(frames_.size());
  if (meta_.duration == 0.0)
    meta_.duration = static_cast<double>(meta_.frame_count) / meta_.fps.value();
  if (!frames_.empty()) {
    meta_.width = frames_.front().width;
    meta_.height = frames_.front().height;
  }
}

GrayFrame MemoryFrameSource::frame(std::int64_t index) {
  if (index < 0 || index >= static_cast<std::int64_t>(frames_.size()))
    throw SpanOutOfRange("MemoryFrameSource: frame index out of range");
  return frames_[static_cast<std::size_t>(index)];
}

DecodedFrameSource::DecodedFrameSource(VideoMeta meta, std::optional<int> downscale_width,
                                       std::size_t cache_seconds)
    : meta_(std::move(meta)),
      downscale_width_(downscale_width),
      cache_seconds_(std::max<std::size_t>(1, cache_seconds)) {}

const std::vector<GrayFrame>& DecodedFrameSource::chunk(std::int64_t second) {
  if (auto it = cache_.find(second); it != cache_.end()) {
    lru_.remove(second);
    lru_.push_back(second);
    return it->second;
  }
  const std::int64_t first = (second * meta_.fps.num + meta_.fps.den - 1) / meta_.fps.den;
  const std::int64_t next = ((second + 1) * meta_.fps.num + meta_.fps.den - 1) / meta_.fps.den;
  const std::int64_t end = std::min(next, meta_.frame_count);
  if (first >= end) throw SpanOutOfRange("DecodedFrameSource: second beyond stream");

  media_io::DecodeOptions opts;
  opts.downscale_width = downscale_width_;
  opts.frame_range = FrameSpan{first, end};
  media_io::GrayFrameStream stream(meta_, opts);
  std::vector<GrayFrame> frames;
  frames.reserve(static_cast<std::size_t>(end - first));
  while (auto f = stream.next()) frames.push_back(std::move(f->second));
  if (frames.size() != static_cast<std::size_t>(end - first))
    throw DecodeError("DecodedFrameSource: short decode for second " + std::to_string(second));

  if (cache_.size() >= cache_seconds_) {
    cache_.erase(lru_.front());
    lru_.pop_front();
  }
  lru_.push_back(second);
  return cache_.emplace(second, std::move(frames)).first->second;
}

GrayFrame DecodedFrameSource::frame(std::int64_t index) {
  if (index < 0 || index >= meta_.frame_count)
    throw SpanOutOfRange("DecodedFrameSource: frame index out of range");
  const std::int64_t second = index * meta_.fps.den / meta_.fps.num;
  const auto& frames = chunk(second);
  const std::int64_t first = (second * meta_.fps.num + meta_.fps.den - 1) / meta_.fps.den;
  return frames[static_cast<std::size_t>(index - first)];
}

}  // namespace moments
