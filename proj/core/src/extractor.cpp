#include "moments/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace moments::extractor {

TimeSpan frames_to_timespan(const FrameSpan& span, const Rational& fps) {
  if (!span.valid() || fps.num <= 0 || fps.den <= 0)
    throw InvalidSpan("frames_to_timespan: invalid span or fps");
  const double f = fps.value();
  return {static_cast<double>(span.begin) / f, static_cast<double>(span.end) / f};
}

TimeSpan apply_evs(const TimeSpan& video_span, const Transcript& t, double evs,
                   double g_duration) {
  if (evs < 0.0) throw ConfigError("apply_evs: evs must be non-negative");
  double end = video_span.end + evs;
  // Completeness snap: extend to the end of the segment the nominal end
  // lands in, so commentary is not cut off mid-sentence.
  for (const auto& seg : t.segments) {
    if (seg.start <= end && end < seg.end) {
      end = seg.end;
      break;
    }
  }
  end = std::max(video_span.end, std::min(end, g_duration));
  return {video_span.start, end};
}

std::string collect_transcript(const Transcript& t, const TimeSpan& audio_span) {
  std::string out;
  for (const auto& seg : t.segments) {
    const double overlap = std::min(seg.end, audio_span.end) - std::max(seg.start, audio_span.start);
    const double seg_len = seg.end - seg.start;
    if (seg_len <= 0.0 || overlap <= 0.5 * seg_len) continue;
    if (!out.empty()) out += ' ';
    out += seg.text;
  }
  return out;
}

namespace {

json record_to_json(const MomentRecord& r) {
  return json{{"id", r.id},
              {"game_id", r.game_id},
              {"label", r.label},
              {"video_span", {r.video_span.start, r.video_span.end}},
              {"audio_span", {r.audio_span.start, r.audio_span.end}},
              {"transcript_text", r.transcript_text},
              {"media_paths", {{"video", r.video_path}, {"audio", r.audio_path}}}};
}

MomentRecord record_from_json(const json& j) {
  MomentRecord r;
  r.id = j.at("id").get<std::string>();
  r.game_id = j.at("game_id").get<std::string>();
  r.label = j.at("label").get<int>();
  r.video_span = {j.at("video_span").at(0).get<double>(), j.at("video_span").at(1).get<double>()};
  r.audio_span = {j.at("audio_span").at(0).get<double>(), j.at("audio_span").at(1).get<double>()};
  r.transcript_text = j.value("transcript_text", "");
  if (j.contains("media_paths")) {
    r.video_path = j.at("media_paths").value("video", "");
    r.audio_path = j.at("media_paths").value("audio", "");
  }
  return r;
}

}  // namespace

void write_manifest(const std::string& path, const std::vector<MomentRecord>& records,
                    const std::string& provenance_hash) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw DataError("write_manifest: cannot write " + tmp);
    const json header = {{"schema", "moments-manifest"},
                         {"version", 1},
                         {"provenance", provenance_hash},
                         {"count", records.size()}};
    out << header.dump() << "\n";
    for (const auto& r : records) out << record_to_json(r).dump() << "\n";
    if (!out) throw DataError("write_manifest: short write to " + tmp);
  }
  fs::rename(tmp, path);
}

std::vector<MomentRecord> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("read_manifest: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("read_manifest: empty manifest " + path);
  try {
    const json header = json::parse(line);
    if (header.value("schema", "") != "moments-manifest")
      throw ParseError("read_manifest: unexpected schema in " + path);
    std::vector<MomentRecord> records;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      records.push_back(record_from_json(json::parse(line)));
    }
    return records;
  } catch (const json::exception& e) {
    throw ParseError("read_manifest: bad JSONL in " + path + ": " + e.what());
  }
}

BuildResult build_moments(const BuildInputs& in, const std::string& out_dir,
                          const std::string& provenance_hash, ClipFn clip_fn) {
  if (!clip_fn)
    clip_fn = [](const std::string& media, const TimeSpan& vs, const TimeSpan& as,
                 const std::string& dir, const std::string& stem) {
      return media_io::extract_clip(media, vs, as, dir, stem);
    };

  fs::create_directories(out_dir);
  BuildResult result;

  const auto assemble = [&](const std::vector<TimeSpan>& spans, int label,
                            const std::string& tag) {
    for (std::size_t i = 0; i < spans.size(); ++i) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_%s_%04zu", tag.c_str(), i);
      MomentRecord r;
      r.id = in.game_id + suffix;
      r.game_id = in.game_id;
      r.label = label;
      r.video_span = spans[i];
      r.audio_span = apply_evs(spans[i], in.transcript, in.evs_seconds, in.g_meta.duration);
      r.transcript_text = collect_transcript(in.transcript, r.audio_span);
      if (in.extract_media) {
        try {
          const auto paths = clip_fn(in.g_meta.path, r.video_span, r.audio_span, out_dir, r.id);
          r.video_path = paths.video_path;
          r.audio_path = paths.audio_path;
        } catch (const MomentsError& e) {
          result.rejects.push_back(r.id + ": " + e.what());
          continue;
        }
      }
      result.records.push_back(std::move(r));
    }
  };
  assemble(in.important_spans, 1, "im");
  assemble(in.nonimportant_spans, 0, "nim");

  result.manifest_path = (fs::path(out_dir) / "moments_manifest.jsonl").string();
  write_manifest(result.manifest_path, result.records, provenance_hash);
  if (!result.rejects.empty()) {
    std::ofstream rej((fs::path(out_dir) / "rejects.log").string());
    for (const auto& line : result.rejects) rej << line << "\n";
  }
  return result;
}

std::vector<double> evs_lag_diagnostic(const std::vector<MomentRecord>& records,
                                       const Transcript& t) {
  std::vector<double> lags;
  for (const auto& r : records) {
    if (r.label != 1) continue;
    for (const auto& seg : t.segments) {
      if (seg.end > r.video_span.start && seg.start < r.audio_span.end) {
        lags.push_back(seg.start - r.video_span.start);
        break;
      }
    }
  }
  return lags;
}

}  // namespace moments::extractor
