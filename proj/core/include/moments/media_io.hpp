#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "moments/subprocess.hpp"
#include "moments/types.hpp"

namespace moments::media_io {

// Transcoder / prober executables. Overridable via the MOMENTS_FFMPEG and
// MOMENTS_FFPROBE environment variables; any FFmpeg-CLI-compatible tool works.
std::string transcoder_binary();
std::string prober_binary();

VideoMeta probe(const std::string& path);

enum class SecondSelector {
  Initial,  // first frame of each second: ceil(s * fps)
  Center,   // center-most frame: floor((s + 0.5) * fps), clamped to the second
};

struct DecodeOptions {
  bool per_second = false;  // emit one representative frame per whole second
  SecondSelector selector = SecondSelector::Center;
  std::optional<int> downscale_width;  // aspect-preserving downscale
  // Native-frame subrange [first_frame, end_frame) to decode; whole stream
  // when absent.
  std::optional<FrameSpan> frame_range;
};

// Streaming grayscale decode via the transcoder subprocess. Frames are
// emitted in temporal order; indices are native frame numbers.
class GrayFrameStream {
 public:
  GrayFrameStream(const VideoMeta& meta, const DecodeOptions& opts = {});
  ~GrayFrameStream();

  // Next (native_index, frame), or nullopt at end of stream.
  std::optional<std::pair<std::int64_t, GrayFrame>> next();

  int frame_width() const { return out_width_; }
  int frame_height() const { return out_height_; }

 private:
  VideoMeta meta_;
  DecodeOptions opts_;
  std::unique_ptr<subprocess::Child> child_;
  int out_width_ = 0;
  int out_height_ = 0;
  std::int64_t next_index_ = 0;
  std::int64_t end_index_ = 0;
  bool done_ = false;
};

// Output dimensions after an aspect-preserving downscale to target_width.
std::pair<int, int> scaled_dims(int width, int height, int target_width);

// Index of the per-second representative frame (selector applied), for
// whole second s of a stream with the given fps. Returns nullopt when the
// second is not fully covered by frame_count (partial tail second).
std::optional<std::int64_t> second_frame_index(std::int64_t second, const Rational& fps,
                                               std::int64_t frame_count, SecondSelector sel);

// Number of whole seconds usable for per-second indexing (partial tail
// second dropped).
std::int64_t whole_seconds(const VideoMeta& meta);

struct ClipPaths {
  std::string video_path;
  std::string audio_path;
};

// Cuts one video clip over video_span and one audio clip over audio_span
// out of the source media. audio_span must start with video_span and end at
// or after it.
ClipPaths extract_clip(const std::string& path, const TimeSpan& video_span,
                       const TimeSpan& audio_span, const std::string& out_dir,
                       const std::string& stem);

Transcript read_transcript(const std::string& path);

}  // namespace moments::media_io
