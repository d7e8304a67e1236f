#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "moments/localizer.hpp"
#include "moments/media_io.hpp"
#include "moments/moment_record.hpp"
#include "moments/types.hpp"

namespace moments::extractor {

TimeSpan frames_to_timespan(const FrameSpan& span, const Rational& fps);

// Extends the video span by the eye-voice-span latency and snaps the end to
// a transcript segment boundary when the nominal end lands inside one.
// g_duration clamps the result.
TimeSpan apply_evs(const TimeSpan& video_span, const Transcript& t, double evs = 3.0,
                   double g_duration = std::numeric_limits<double>::infinity());

// Joined text of all segments overlapping the span by more than half of the
// segment's own duration.
std::string collect_transcript(const Transcript& t, const TimeSpan& audio_span);

// Media cutter injection point; the default forwards to media_io::extract_clip.
// A dry-run extractor records target paths without invoking the transcoder.
using ClipFn = std::function<media_io::ClipPaths(
    const std::string& media_path, const TimeSpan& video_span, const TimeSpan& audio_span,
    const std::string& out_dir, const std::string& stem)>;

struct BuildInputs {
  std::vector<TimeSpan> important_spans;      // over G, seconds
  std::vector<TimeSpan> nonimportant_spans;   // over G, seconds
  Transcript transcript;
  VideoMeta g_meta;
  std::string game_id;
  double evs_seconds = 3.0;
  bool extract_media = true;
};

struct BuildResult {
  std::vector<MomentRecord> records;
  std::vector<std::string> rejects;  // ids that failed media extraction, with reason
  std::string manifest_path;
};

// Assembles labeled records for every important and non-important span,
// extracts their media, and writes the manifest (JSONL, atomic rename).
BuildResult build_moments(const BuildInputs& in, const std::string& out_dir,
                          const std::string& provenance_hash = "", ClipFn clip_fn = {});

// Per important record, lag between video start and the first overlapping
// transcript segment's start; diagnostic for the EVS latency.
std::vector<double> evs_lag_diagnostic(const std::vector<MomentRecord>& records,
                                       const Transcript& t);

// Manifest I/O. First line is a schema header; one record JSON per line.
void write_manifest(const std::string& path, const std::vector<MomentRecord>& records,
                    const std::string& provenance_hash);
std::vector<MomentRecord> read_manifest(const std::string& path);

}  // namespace moments::extractor
