#include "moments/media_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace moments::media_io {

namespace {

std::string env_or(const char* var, const char* fallback) {
  const char* v = std::getenv(var);
  return (v && *v) ? v : fallback;
}

std::string seconds_arg(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", t);
  return buf;
}

Rational parse_rate(const std::string& s) {
  const auto slash = s.find('/');
  Rational r;
  if (slash == std::string::npos) {
    r.num = std::llround(std::stod(s));
    r.den = 1;
  } else {
    r.num = std::stoll(s.substr(0, slash));
    r.den = std::stoll(s.substr(slash + 1));
  }
  if (r.num <= 0 || r.den <= 0) throw DecodeError("probe: invalid frame rate '" + s + "'");
  return r;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// First native frame of whole second s.
std::int64_t second_start(std::int64_t s, const Rational& fps) {
  return ceil_div(s * fps.num, fps.den);
}

}  // namespace

std::string transcoder_binary() { return env_or("MOMENTS_FFMPEG", "ffmpeg"); }
std::string prober_binary() { return env_or("MOMENTS_FFPROBE", "ffprobe"); }

VideoMeta probe(const std::string& path) {
  if (!fs::exists(path)) throw FileNotFound("probe: no such file: " + path);
  std::string out;
  const int rc = subprocess::run(
      {prober_binary(), "-v", "error", "-select_streams", "v:0", "-show_entries",
       "stream=width,height,r_frame_rate,nb_frames:format=duration", "-of", "json", path},
      &out);
  if (rc != 0) throw DecodeError("probe: prober failed on " + path);

  VideoMeta meta;
  meta.path = path;
  try {
    const json j = json::parse(out);
    const auto& stream = j.at("streams").at(0);
    meta.width = stream.at("width").get<int>();
    meta.height = stream.at("height").get<int>();
    meta.fps = parse_rate(stream.at("r_frame_rate").get<std::string>());
    if (stream.contains("nb_frames")) {
      const auto& nf = stream.at("nb_frames");
      meta.frame_count = nf.is_string() ? std::stoll(nf.get<std::string>())
                                        : nf.get<std::int64_t>();
    }
    if (j.contains("format") && j.at("format").contains("duration")) {
      const auto& d = j.at("format").at("duration");
      meta.duration = d.is_string() ? std::stod(d.get<std::string>()) : d.get<double>();
    }
  } catch (const json::exception& e) {
    throw DecodeError("probe: unparsable prober output for " + path + ": " + e.what());
  }
  if (meta.frame_count == 0 && meta.duration > 0)
    meta.frame_count = std::llround(meta.duration * meta.fps.value());
  if (meta.duration == 0.0 && meta.frame_count > 0)
    meta.duration = static_cast<double>(meta.frame_count) / meta.fps.value();
  if (meta.frame_count < 0 || meta.width <= 0 || meta.height <= 0)
    throw DecodeError("probe: invalid stream geometry for " + path);
  return meta;
}

std::pair<int, int> scaled_dims(int width, int height, int target_width) {
  if (target_width <= 0 || target_width > width)
    throw ConfigError("downscale width must be in (0, native width]");
  const int out_h = std::max(
      1, static_cast<int>((static_cast<std::int64_t>(height) * target_width + width / 2) / width));
  return {target_width, out_h};
}

std::optional<std::int64_t> second_frame_index(std::int64_t second, const Rational& fps,
                                               std::int64_t frame_count, SecondSelector sel) {
  const std::int64_t start = second_start(second, fps);
  const std::int64_t end = second_start(second + 1, fps);
  if (end > frame_count || start >= end) return std::nullopt;  // partial tail second
  if (sel == SecondSelector::Initial) return start;
  // Center-most frame: floor((s + 0.5) * fps), clamped to the second.
  const std::int64_t center = (2 * second + 1) * fps.num / (2 * fps.den);
  return std::clamp(center, start, end - 1);
}

std::int64_t whole_seconds(const VideoMeta& meta) {
  return meta.frame_count * meta.fps.den / meta.fps.num;
}

GrayFrameStream::GrayFrameStream(const VideoMeta& meta, const DecodeOptions& opts)
    : meta_(meta), opts_(opts) {
  std::vector<std::string> argv = {transcoder_binary(), "-v", "error"};
  std::int64_t first = 0;
  end_index_ = meta.frame_count;
  if (opts.frame_range) {
    const auto& r = *opts.frame_range;
    if (!r.valid() || r.end > meta.frame_count)
      throw SpanOutOfRange("decode: frame range outside stream");
    first = r.begin;
    end_index_ = r.end;
    argv.insert(argv.end(), {"-ss", seconds_arg(static_cast<double>(first) / meta.fps.value()),
                             "-t", seconds_arg(static_cast<double>(r.length()) / meta.fps.value())});
  }
  argv.insert(argv.end(), {"-i", meta.path});
  out_width_ = meta.width;
  out_height_ = meta.height;
  if (opts.downscale_width) {
    std::tie(out_width_, out_height_) = scaled_dims(meta.width, meta.height, *opts.downscale_width);
    argv.insert(argv.end(), {"-vf", "scale=" + std::to_string(out_width_) + ":-1"});
  }
  argv.insert(argv.end(), {"-f", "rawvideo", "-pix_fmt", "gray", "pipe:1"});
  next_index_ = first;
  child_ = std::make_unique<subprocess::Child>(argv);
}

GrayFrameStream::~GrayFrameStream() = default;

std::optional<std::pair<std::int64_t, GrayFrame>> GrayFrameStream::next() {
  const std::size_t packet = static_cast<std::size_t>(out_width_) * out_height_;
  while (!done_) {
    if (next_index_ >= end_index_) {
      done_ = true;
      break;
    }
    GrayFrame f;
    f.width = out_width_;
    f.height = out_height_;
    f.pixels.resize(packet);
    const std::size_t got = child_->read_full(f.pixels.data(), packet);
    if (got == 0) {
      done_ = true;
      const int rc = child_->wait();
      if (rc != 0) throw DecodeError("decode: transcoder exited with code " + std::to_string(rc));
      break;
    }
    if (got != packet) throw PipeBroken("decode: truncated frame packet mid-stream");
    const std::int64_t idx = next_index_++;
    if (opts_.per_second) {
      const std::int64_t second = idx * meta_.fps.den / meta_.fps.num;
      const auto rep = second_frame_index(second, meta_.fps, meta_.frame_count, opts_.selector);
      if (!rep || *rep != idx) continue;
    }
    return std::make_pair(idx, std::move(f));
  }
  if (child_) {
    const int rc = child_->wait();
    if (rc != 0) throw DecodeError("decode: transcoder exited with code " + std::to_string(rc));
  }
  return std::nullopt;
}

ClipPaths extract_clip(const std::string& path, const TimeSpan& video_span,
                       const TimeSpan& audio_span, const std::string& out_dir,
                       const std::string& stem) {
  const VideoMeta meta = probe(path);
  constexpr double kEps = 1e-6;
  if (!video_span.valid() || !audio_span.valid())
    throw SpanOutOfRange("extract_clip: degenerate span");
  if (std::abs(audio_span.start - video_span.start) > kEps)
    throw SpanOutOfRange("extract_clip: audio span must start with video span");
  if (audio_span.end < video_span.end - kEps)
    throw SpanOutOfRange("extract_clip: audio span must cover the video span");
  if (audio_span.end > meta.duration + kEps || video_span.end > meta.duration + kEps)
    throw SpanOutOfRange("extract_clip: span beyond end of media");

  fs::create_directories(out_dir);
  const std::string ext = fs::path(path).extension().string();
  ClipPaths out;
  out.video_path = (fs::path(out_dir) / (stem + "_video" + ext)).string();
  out.audio_path = (fs::path(out_dir) / (stem + "_audio.wav")).string();

  const auto cut = [&](const TimeSpan& span, const std::string& drop_flag,
                       const std::string& out_path) {
    const int rc = subprocess::run({transcoder_binary(), "-v", "error", "-y", "-ss",
                                    seconds_arg(span.start), "-t", seconds_arg(span.length()),
                                    "-i", path, drop_flag, out_path});
    if (rc != 0 || !fs::exists(out_path))
      throw TranscodeError("extract_clip: transcoder failed writing " + out_path);
  };
  cut(video_span, "-an", out.video_path);
  cut(audio_span, "-vn", out.audio_path);
  return out;
}

Transcript read_transcript(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("read_transcript: cannot open " + path);
  Transcript t;
  try {
    const json j = json::parse(in);
    for (const auto& seg : j.at("segments")) {
      TranscriptSegment s;
      s.start = seg.at("start").get<double>();
      s.end = seg.at("end").get<double>();
      s.text = seg.value("text", "");
      if (s.end <= s.start)
        throw ParseError("read_transcript: segment with end <= start in " + path);
      t.segments.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ParseError("read_transcript: bad segment JSON in " + path + ": " + e.what());
  }
  std::stable_sort(t.segments.begin(), t.segments.end(),
                   [](const auto& a, const auto& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < t.segments.size(); ++i)
    if (t.segments[i].start < t.segments[i - 1].end) t.has_overlaps = true;
  if (t.segments.empty())
    std::cerr << "warning: empty transcript: " << path << "\n";
  return t;
}

}  // namespace moments::media_io
