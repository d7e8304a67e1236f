#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "moments/types.hpp"

namespace moments::synthcorpus {

enum class OverlayKind { Scorecard, AdBanner, Watermark };

struct SynthSpec {
  std::uint64_t seed = 1;
  double g_duration = 60.0;  // seconds
  Rational fps{5, 1};
  int width = 64;
  int height = 36;
  std::vector<TimeSpan> highlight_segments;  // in G, disjoint
  std::set<OverlayKind> overlays;
  double noise_sigma = 0.0;  // additive Gaussian luma noise on H frames
  // Temporal drift rate of the procedural pattern; tuned so frames half a
  // second apart score in the mid-0.4 similarity band and adjacent frames
  // stay above 0.9.
  double pattern_speed = 1.0;
};

struct SynthGame {
  VideoMeta meta;
  std::vector<GrayFrame> frames;
};

struct SynthHighlight {
  VideoMeta meta;
  std::vector<GrayFrame> frames;
  std::vector<FrameSpan> ground_truth;  // exact G frame spans
};

// Deterministic procedural full-game stream: smoothly time-varying pattern
// (moving gradient plus drifting blobs) so nearby frames are similar and
// distant frames are not.
SynthGame generate_game(const SynthSpec& spec);

// Concatenates the spec'd segments in order, applies the overlay kinds and
// additive noise, and returns the exact source spans as ground truth.
SynthHighlight make_highlight(const SynthGame& game, const SynthSpec& spec);

// Raw gray video container ("GRV1"): magic line, JSON header line, then
// frame_count packets of width*height bytes.
void write_grv(const std::string& path, const VideoMeta& meta,
               const std::vector<GrayFrame>& frames);
std::pair<VideoMeta, std::vector<GrayFrame>> read_grv(const std::string& path);

// Ground-truth sidecar JSON (spans, seed, overlay config) consumed by
// integration tests and the CLI.
void write_ground_truth(const std::string& path, const SynthSpec& spec,
                        const std::vector<FrameSpan>& spans);
std::vector<FrameSpan> read_ground_truth(const std::string& path);

}  // namespace moments::synthcorpus
