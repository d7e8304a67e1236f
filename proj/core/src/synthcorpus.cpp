#include "moments/synthcorpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

using nlohmann::json;

namespace moments::synthcorpus {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

struct Blob {
  double cx, cy;        // base position, fraction of frame
  double rx, ry;        // drift radius, fraction of frame
  double wx, wy;        // angular velocities, rad/s
  double phase;
  double sigma;         // fraction of min dimension
  double amplitude;     // signed luma
};

struct Pattern {
  double grad_wavelength_x, grad_wavelength_y;  // pixels
  double grad_vx, grad_vy;                      // cycles/s
  double grad_amplitude;
  std::vector<Blob> blobs;

  static Pattern from_seed(std::uint64_t seed, int width, int height, double speed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Pattern p;
    p.grad_wavelength_x = width * (0.5 + 0.5 * uni(rng));
    p.grad_wavelength_y = height * (0.5 + 0.5 * uni(rng));
    p.grad_vx = speed * (0.25 + 0.25 * uni(rng));
    p.grad_vy = speed * (0.15 + 0.20 * uni(rng));
    p.grad_amplitude = 45.0 + 15.0 * uni(rng);
    const int n_blobs = 4;
    for (int i = 0; i < n_blobs; ++i) {
      Blob b;
      b.cx = 0.15 + 0.7 * uni(rng);
      b.cy = 0.15 + 0.7 * uni(rng);
      b.rx = 0.10 + 0.25 * uni(rng);
      b.ry = 0.10 + 0.25 * uni(rng);
      b.wx = speed * kTau * (0.3 + 0.5 * uni(rng));
      b.wy = speed * kTau * (0.3 + 0.5 * uni(rng));
      b.phase = kTau * uni(rng);
      b.sigma = 0.08 + 0.10 * uni(rng);
      b.amplitude = (i % 2 == 0 ? 1.0 : -1.0) * (55.0 + 30.0 * uni(rng));
      p.blobs.push_back(b);
    }
    return p;
  }

  GrayFrame render(int width, int height, double t) const {
    GrayFrame f;
    f.width = width;
    f.height = height;
    f.pixels.resize(static_cast<std::size_t>(width) * height);
    const double min_dim = std::min(width, height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double v = 127.0 +
                   grad_amplitude *
                       std::sin(kTau * (x / grad_wavelength_x + grad_vx * t)) *
                       std::cos(kTau * (y / grad_wavelength_y + grad_vy * t));
        for (const auto& b : blobs) {
          const double bx = (b.cx + b.rx * std::cos(b.wx * t + b.phase)) * width;
          const double by = (b.cy + b.ry * std::sin(b.wy * t + b.phase)) * height;
          const double s = b.sigma * min_dim;
          const double dx = x - bx, dy = y - by;
          v += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
        }
        f.at(y, x) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      }
    }
    return f;
  }
};

void check_segments(const SynthSpec& spec) {
  std::vector<TimeSpan> sorted = spec.highlight_segments;
  std::sort(sorted.begin(), sorted.end(),
            [](const TimeSpan& a, const TimeSpan& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!sorted[i].valid() || sorted[i].end > spec.g_duration + 1e-9)
      throw SpanOutOfRange("synthcorpus: segment outside [0, g_duration]");
    if (i > 0 && sorted[i].start < sorted[i - 1].end)
      throw SpanOutOfRange("synthcorpus: overlapping highlight segments");
  }
}

void apply_overlays(GrayFrame& f, const std::set<OverlayKind>& overlays) {
  const auto fill = [&](double x0, double y0, double x1, double y1, std::uint8_t value) {
    const int cx0 = static_cast<int>(x0 * f.width), cx1 = static_cast<int>(x1 * f.width);
    const int cy0 = static_cast<int>(y0 * f.height), cy1 = static_cast<int>(y1 * f.height);
    for (int y = cy0; y < cy1; ++y)
      for (int x = cx0; x < cx1; ++x) f.at(y, x) = value;
  };
  // Fixed regions, each well under 15% of the frame area.
  if (overlays.count(OverlayKind::Scorecard)) fill(0.03, 0.04, 0.33, 0.16, 235);
  if (overlays.count(OverlayKind::AdBanner)) fill(0.0, 0.92, 1.0, 1.0, 30);
  if (overlays.count(OverlayKind::Watermark)) fill(0.88, 0.04, 0.98, 0.14, 200);
}

void add_noise(GrayFrame& f, double sigma, std::uint64_t seed, std::int64_t frame_index) {
  if (sigma <= 0.0) return;
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(frame_index));
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& px : f.pixels)
    px = static_cast<std::uint8_t>(std::clamp(px + noise(rng), 0.0, 255.0));
}

}  // namespace

SynthGame generate_game(const SynthSpec& spec) {
  if (spec.fps.num <= 0 || spec.fps.den <= 0 || spec.fps.value() < 1.0 || spec.fps.value() > 30.0)
    throw ConfigError("synthcorpus: fps must be in [1, 30]");
  check_segments(spec);
  const auto pattern = Pattern::from_seed(spec.seed, spec.width, spec.height, spec.pattern_speed);
  SynthGame game;
  const auto frame_count =
      static_cast<std::int64_t>(std::llround(spec.g_duration * spec.fps.value()));
  game.frames.reserve(static_cast<std::size_t>(frame_count));
  for (std::int64_t i = 0; i < frame_count; ++i) {
    const double t = static_cast<double>(i) / spec.fps.value();
    game.frames.push_back(pattern.render(spec.width, spec.height, t));
  }
  game.meta.path = "synth://game/" + std::to_string(spec.seed);
  game.meta.fps = spec.fps;
  game.meta.frame_count = frame_count;
  game.meta.duration = spec.g_duration;
  game.meta.width = spec.width;
  game.meta.height = spec.height;
  return game;
}

SynthHighlight make_highlight(const SynthGame& game, const SynthSpec& spec) {
  check_segments(spec);
  SynthHighlight h;
  const double fps = game.meta.fps.value();
  std::int64_t emitted = 0;
  for (const auto& seg : spec.highlight_segments) {
    const auto first = static_cast<std::int64_t>(std::llround(seg.start * fps));
    const auto end = static_cast<std::int64_t>(std::llround(seg.end * fps));
    if (first < 0 || end > game.meta.frame_count || first >= end)
      throw SpanOutOfRange("make_highlight: segment outside game");
    h.ground_truth.push_back({first, end});
    for (std::int64_t i = first; i < end; ++i) {
      GrayFrame f = game.frames[static_cast<std::size_t>(i)];
      apply_overlays(f, spec.overlays);
      add_noise(f, spec.noise_sigma, spec.seed ^ 0xA5A5A5A5ULL, emitted++);
      h.frames.push_back(std::move(f));
    }
  }
  h.meta.path = "synth://highlight/" + std::to_string(spec.seed);
  h.meta.fps = game.meta.fps;
  h.meta.frame_count = static_cast<std::int64_t>(h.frames.size());
  h.meta.duration = static_cast<double>(h.frames.size()) / fps;
  h.meta.width = game.meta.width;
  h.meta.height = game.meta.height;
  return h;
}

void write_grv(const std::string& path, const VideoMeta& meta,
               const std::vector<GrayFrame>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_grv: cannot write " + path);
  const json header = {{"width", meta.width},
                       {"height", meta.height},
                       {"fps_num", meta.fps.num},
                       {"fps_den", meta.fps.den},
                       {"frame_count", frames.size()}};
  out << "GRV1\n" << header.dump() << "\n";
  for (const auto& f : frames)
    out.write(reinterpret_cast<const char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixels.size()));
  if (!out) throw DataError("write_grv: short write to " + path);
}

std::pair<VideoMeta, std::vector<GrayFrame>> read_grv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("read_grv: cannot open " + path);
  std::string magic, header_line;
  std::getline(in, magic);
  std::getline(in, header_line);
  if (magic != "GRV1") throw DecodeError("read_grv: bad magic in " + path);
  VideoMeta meta;
  std::int64_t count = 0;
  try {
    const json header = json::parse(header_line);
    meta.width = header.at("width").get<int>();
    meta.height = header.at("height").get<int>();
    meta.fps = {header.at("fps_num").get<std::int64_t>(), header.at("fps_den").get<std::int64_t>()};
    count = header.at("frame_count").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw DecodeError("read_grv: bad header in " + path + ": " + e.what());
  }
  meta.path = path;
  meta.frame_count = count;
  meta.duration = static_cast<double>(count) / meta.fps.value();
  std::vector<GrayFrame> frames;
  frames.reserve(static_cast<std::size_t>(count));
  const std::size_t packet = static_cast<std::size_t>(meta.width) * meta.height;
  for (std::int64_t i = 0; i < count; ++i) {
    GrayFrame f;
    f.width = meta.width;
    f.height = meta.height;
    f.pixels.resize(packet);
    in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(packet));
    if (in.gcount() != static_cast<std::streamsize>(packet))
      throw DecodeError("read_grv: truncated frame data in " + path);
    frames.push_back(std::move(f));
  }
  return {meta, std::move(frames)};
}

void write_ground_truth(const std::string& path, const SynthSpec& spec,
                        const std::vector<FrameSpan>& spans) {
  std::ofstream out(path);
  if (!out) throw DataError("write_ground_truth: cannot write " + path);
  json span_array = json::array();
  for (const auto& s : spans) span_array.push_back(json::array({s.begin, s.end}));
  json overlay_array = json::array();
  for (const auto o : spec.overlays) {
    switch (o) {
      case OverlayKind::Scorecard: overlay_array.push_back("scorecard"); break;
      case OverlayKind::AdBanner: overlay_array.push_back("ad_banner"); break;
      case OverlayKind::Watermark: overlay_array.push_back("watermark"); break;
    }
  }
  out << json{{"seed", spec.seed},
              {"noise_sigma", spec.noise_sigma},
              {"pattern_speed", spec.pattern_speed},
              {"overlays", std::move(overlay_array)},
              {"spans", std::move(span_array)}}
             .dump(2);
}

std::vector<FrameSpan> read_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("read_ground_truth: cannot open " + path);
  try {
    const json j = json::parse(in);
    std::vector<FrameSpan> spans;
    for (const auto& s : j.at("spans"))
      spans.push_back({s.at(0).get<std::int64_t>(), s.at(1).get<std::int64_t>()});
    return spans;
  } catch (const json::exception& e) {
    throw ParseError("read_ground_truth: bad JSON in " + path + ": " + e.what());
  }
}

}  // namespace moments::synthcorpus
