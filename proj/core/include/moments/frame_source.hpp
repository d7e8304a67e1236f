#pragma once

#include <list>
#include <map>
#include <utility>
#include <vector>

#include "moments/media_io.hpp"
#include "moments/types.hpp"

namespace moments {

// Random access to the grayscale frames of one video stream. Indices are
// native frame numbers.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual const VideoMeta& meta() const = 0;
  virtual GrayFrame frame(std::int64_t index) = 0;
};

// In-memory stream; used by the synthetic corpus and tests.
class MemoryFrameSource : public FrameSource {
 public:
  MemoryFrameSource(VideoMeta meta, std::vector<GrayFrame> frames);

  const VideoMeta& meta() const override { return meta_; }
  GrayFrame frame(std::int64_t index) override;

 private:
  VideoMeta meta_;
  std::vector<GrayFrame> frames_;
};

// Transcoder-backed source with a one-second-chunk LRU cache. Random access
// decodes the containing second via the subprocess and keeps recent seconds
// resident.
class DecodedFrameSource : public FrameSource {
 public:
  // meta must come from media_io::probe on the same path. downscale_width
  // applies an aspect-preserving resize in the transcoder.
  DecodedFrameSource(VideoMeta meta, std::optional<int> downscale_width = {},
                     std::size_t cache_seconds = 64);

  const VideoMeta& meta() const override { return meta_; }
  GrayFrame frame(std::int64_t index) override;

 private:
  const std::vector<GrayFrame>& chunk(std::int64_t second);

  VideoMeta meta_;
  std::optional<int> downscale_width_;
  std::size_t cache_seconds_;
  std::map<std::int64_t, std::vector<GrayFrame>> cache_;
  std::list<std::int64_t> lru_;
};

}  // namespace moments
