#include "moments/localizer.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

using nlohmann::json;

namespace moments::localizer {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t second_first_frame(std::int64_t s, const Rational& fps) {
  return ceil_div(s * fps.num, fps.den);
}

struct Best {
  std::optional<std::int64_t> index;
  double similarity = -1.0;

  // Lowest index wins among equal similarities.
  void offer(std::int64_t idx, double sim) {
    if (!index || sim > similarity) {
      index = idx;
      similarity = sim;
    } else if (sim == similarity && idx < *index) {
      index = idx;
    }
  }
};

LocalizationStatus status_for(const Best& best, double threshold) {
  if (!best.index) return LocalizationStatus::Unmatched;
  return best.similarity >= threshold ? LocalizationStatus::WellLocalized
                                      : LocalizationStatus::PoorlyLocalized;
}

}  // namespace

std::string to_string(LocalizationStatus s) {
  switch (s) {
    case LocalizationStatus::WellLocalized: return "well_localized";
    case LocalizationStatus::PoorlyLocalized: return "poorly_localized";
    case LocalizationStatus::Unmatched: return "unmatched";
  }
  return "unmatched";
}

LocalizationStatus status_from_string(const std::string& s) {
  if (s == "well_localized") return LocalizationStatus::WellLocalized;
  if (s == "poorly_localized") return LocalizationStatus::PoorlyLocalized;
  if (s == "unmatched") return LocalizationStatus::Unmatched;
  throw ParseError("unknown localization status: " + s);
}

double Similarity::operator()(const GrayFrame& a, const GrayFrame& b) {
  ++evals_;
  return cfg_.use_multiscale ? ssim::ms_ssim(a, b, cfg_.ssim_params)
                             : ssim::ssim_single(a, b, cfg_.ssim_params);
}

std::vector<std::int64_t> coarse_candidates(
    const GrayFrame& h_anchor, const std::vector<std::pair<std::int64_t, GrayFrame>>& g_reps,
    const LocalizerConfig& cfg, Similarity& sim) {
  std::vector<std::pair<double, std::int64_t>> hits;
  for (const auto& [second, rep] : g_reps) {
    const double s = sim(h_anchor, rep);
    if (s >= cfg.candidate_threshold) hits.emplace_back(s, second);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::int64_t> out;
  out.reserve(hits.size());
  for (const auto& [s, second] : hits) out.push_back(second);
  return out;
}

SecondAlignment refine_within_seconds(const GrayFrame& h_anchor, FrameSource& g,
                                      const std::vector<std::int64_t>& candidate_seconds,
                                      const LocalizerConfig& cfg, Similarity& sim) {
  const Rational fps = g.meta().fps;
  Best best;
  for (const std::int64_t second : candidate_seconds) {
    const std::int64_t first = second_first_frame(second, fps);
    const std::int64_t end = std::min(second_first_frame(second + 1, fps), g.meta().frame_count);
    for (std::int64_t idx = first; idx < end; ++idx)
      best.offer(idx, sim(h_anchor, g.frame(idx)));
  }
  SecondAlignment out;
  out.g_frame = best.index;
  out.similarity = best.index ? best.similarity : -1.0;
  out.status = status_for(best, cfg.sim_threshold);
  return out;
}

std::vector<SecondAlignment> prune_and_relocalize(std::vector<SecondAlignment> alignments,
                                                  FrameSource& h, FrameSource& g,
                                                  const LocalizerConfig& cfg, Similarity& sim) {
  const Rational fps_h = h.meta().fps;
  const Rational fps_g = g.meta().fps;
  const std::int64_t g_end = g.meta().frame_count;
  const auto cap_frames =
      static_cast<std::int64_t>(std::llround(cfg.step2_cap * fps_g.value()));

  const int n = static_cast<int>(alignments.size());
  for (int i = 0; i < n; ++i) {
    auto& cur = alignments[i];
    if (cur.status == LocalizationStatus::WellLocalized) continue;

    std::optional<std::int64_t> g_prev, g_next;
    for (int j = i - 1; j >= 0; --j)
      if (alignments[j].status == LocalizationStatus::WellLocalized) {
        g_prev = alignments[j].g_frame;
        break;
      }
    for (int j = i + 1; j < n; ++j)
      if (alignments[j].status == LocalizationStatus::WellLocalized) {
        g_next = alignments[j].g_frame;
        break;
      }

    std::int64_t lo, hi;  // half-open [lo, hi)
    if (cfg.monotonic) {
      // Strictly between the neighbor matches; capped G prefix/suffix when
      // a neighbor is missing.
      lo = g_prev ? *g_prev + 1 : (g_next ? std::max<std::int64_t>(0, *g_next - cap_frames) : 0);
      hi = g_next ? *g_next : (g_prev ? std::min(g_end, *g_prev + 1 + cap_frames)
                                      : std::min(g_end, cap_frames));
    } else {
      // Union of +/- cap around both neighbors.
      lo = 0;
      hi = std::min(g_end, cap_frames);
      if (g_prev || g_next) {
        const std::int64_t a = g_prev.value_or(*g_next);
        const std::int64_t b = g_next.value_or(*g_prev);
        lo = std::max<std::int64_t>(0, std::min(a, b) - cap_frames);
        hi = std::min(g_end, std::max(a, b) + cap_frames);
      }
    }
    if (lo >= hi) continue;

    const auto anchor_idx = second_first_frame(cur.h_second, fps_h);
    const GrayFrame h_anchor = h.frame(anchor_idx);
    Best best;
    for (std::int64_t idx = lo; idx < hi; ++idx)
      best.offer(idx, sim(h_anchor, g.frame(idx)));

    // Only ever improve; never demote an existing match.
    if (best.index && best.similarity > cur.similarity) {
      cur.g_frame = best.index;
      cur.similarity = best.similarity;
      cur.status = status_for(best, cfg.sim_threshold);
    }
  }
  return alignments;
}

std::map<std::int64_t, std::int64_t> dense_match(const std::vector<SecondAlignment>& alignments,
                                                 FrameSource& h, FrameSource& g,
                                                 const LocalizerConfig& cfg, Similarity& sim) {
  const Rational fps_h = h.meta().fps;
  const Rational fps_g = g.meta().fps;
  const std::int64_t g_end = g.meta().frame_count;
  const auto radius = static_cast<std::int64_t>(std::llround(cfg.dense_window * fps_g.value()));

  std::map<std::int64_t, std::int64_t> matches;
  for (const auto& sec : alignments) {
    if (sec.status != LocalizationStatus::WellLocalized || !sec.g_frame) continue;
    const std::int64_t g0 = *sec.g_frame;
    const std::int64_t lo = std::max<std::int64_t>(0, g0 - radius);
    const std::int64_t hi = std::min(g_end, g0 + radius + 1);
    const std::int64_t h_first = second_first_frame(sec.h_second, fps_h);
    const std::int64_t h_end =
        std::min(second_first_frame(sec.h_second + 1, fps_h), h.meta().frame_count);
    for (std::int64_t hf = h_first; hf < h_end; ++hf) {
      const GrayFrame h_frame = h.frame(hf);
      Best best;
      for (std::int64_t gf = lo; gf < hi; ++gf) best.offer(gf, sim(h_frame, g.frame(gf)));
      if (best.index && best.similarity >= cfg.sim_threshold)
        matches[hf] = *best.index;
    }
  }
  return matches;
}

std::vector<FrameSpan> group_moments(const std::vector<std::int64_t>& g_indices,
                                     const Rational& fps_g, double separation) {
  std::vector<FrameSpan> spans;
  if (g_indices.empty()) return spans;
  const auto max_gap = static_cast<std::int64_t>(std::llround(separation * fps_g.value()));
  std::int64_t run_start = g_indices.front();
  std::int64_t prev = g_indices.front();
  for (std::size_t i = 1; i < g_indices.size(); ++i) {
    const std::int64_t idx = g_indices[i];
    if (idx - prev > max_gap) {
      spans.push_back({run_start, prev + 1});
      run_start = idx;
    }
    prev = idx;
  }
  spans.push_back({run_start, prev + 1});
  return spans;
}

AlignmentResult localize(FrameSource& h, FrameSource& g, const LocalizerConfig& cfg,
                         const ProgressFn& progress) {
  const auto note = [&](const std::string& msg) {
    if (progress) progress(msg);
  };

  AlignmentResult result;
  result.config = cfg;
  Similarity sim(cfg);

  const Rational fps_h = h.meta().fps;
  const Rational fps_g = g.meta().fps;
  const std::int64_t h_seconds = h.meta().frame_count * fps_h.den / fps_h.num;
  const std::int64_t g_seconds = g.meta().frame_count * fps_g.den / fps_g.num;
  if (h_seconds == 0 || g_seconds == 0)
    throw DataError("localize: a stream has no whole second of frames");

  // G per-second representatives (center-most frame of each whole second).
  std::vector<std::pair<std::int64_t, GrayFrame>> g_reps;
  g_reps.reserve(static_cast<std::size_t>(g_seconds));
  for (std::int64_t s = 0; s < g_seconds; ++s) {
    const auto rep =
        media_io::second_frame_index(s, fps_g, g.meta().frame_count, media_io::SecondSelector::Center);
    if (rep) g_reps.emplace_back(s, g.frame(*rep));
  }
  note("step1: coarse matching " + std::to_string(h_seconds) + " H seconds against " +
       std::to_string(g_reps.size()) + " G representatives");

  // Step 1: coarse candidates per H second, then refinement at native FPS.
  result.per_second.reserve(static_cast<std::size_t>(h_seconds));
  std::int64_t evals_before = 0;
  for (std::int64_t s = 0; s < h_seconds; ++s) {
    const GrayFrame h_anchor = h.frame(second_first_frame(s, fps_h));
    const auto candidates = coarse_candidates(h_anchor, g_reps, cfg, sim);
    result.stats.coarse_evals += sim.evals() - evals_before;
    evals_before = sim.evals();
    SecondAlignment sa = refine_within_seconds(h_anchor, g, candidates, cfg, sim);
    sa.h_second = s;
    result.stats.refine_evals += sim.evals() - evals_before;
    evals_before = sim.evals();
    result.per_second.push_back(sa);
  }

  note("step2: pruning and relocalizing poorly-localized seconds");
  result.per_second = prune_and_relocalize(std::move(result.per_second), h, g, cfg, sim);
  result.stats.prune_evals = sim.evals() - evals_before;
  evals_before = sim.evals();

  note("step3: dense per-frame matching");
  result.frame_matches = dense_match(result.per_second, h, g, cfg, sim);
  result.stats.dense_evals = sim.evals() - evals_before;
  result.stats.ssim_evals = sim.evals();

  std::vector<std::int64_t> g_hits;
  g_hits.reserve(result.frame_matches.size());
  for (const auto& [hf, gf] : result.frame_matches) g_hits.push_back(gf);
  std::sort(g_hits.begin(), g_hits.end());
  g_hits.erase(std::unique(g_hits.begin(), g_hits.end()), g_hits.end());
  result.moments = group_moments(g_hits, fps_g, cfg.separation);

  std::int64_t well = 0;
  for (const auto& sa : result.per_second)
    if (sa.status == LocalizationStatus::WellLocalized) ++well;
  result.localized_fraction = static_cast<double>(well) / static_cast<double>(h_seconds);
  result.matched_frame_count = static_cast<std::int64_t>(result.frame_matches.size());
  note("done: localized_fraction=" + std::to_string(result.localized_fraction) + ", " +
       std::to_string(result.moments.size()) + " moments, " +
       std::to_string(result.stats.ssim_evals) + " similarity evaluations");
  return result;
}

std::string to_json(const AlignmentResult& r) {
  json per_second = json::array();
  for (const auto& sa : r.per_second) {
    json item = {{"h_second", sa.h_second},
                 {"similarity", sa.similarity},
                 {"status", to_string(sa.status)}};
    if (sa.g_frame) item["g_frame"] = *sa.g_frame;
    per_second.push_back(std::move(item));
  }
  json matches = json::array();
  for (const auto& [hf, gf] : r.frame_matches) matches.push_back(json::array({hf, gf}));
  json moments = json::array();
  for (const auto& span : r.moments) moments.push_back(json::array({span.begin, span.end}));
  const json doc = {
      {"per_second", std::move(per_second)},
      {"frame_matches", std::move(matches)},
      {"moments", std::move(moments)},
      {"localized_fraction", r.localized_fraction},
      {"matched_frame_count", r.matched_frame_count},
      {"config",
       {{"sim_threshold", r.config.sim_threshold},
        {"candidate_threshold", r.config.candidate_threshold},
        {"separation", r.config.separation},
        {"dense_window", r.config.dense_window},
        {"monotonic", r.config.monotonic},
        {"step2_cap", r.config.step2_cap},
        {"use_multiscale", r.config.use_multiscale}}},
      {"stats",
       {{"ssim_evals", r.stats.ssim_evals},
        {"coarse_evals", r.stats.coarse_evals},
        {"refine_evals", r.stats.refine_evals},
        {"prune_evals", r.stats.prune_evals},
        {"dense_evals", r.stats.dense_evals}}}};
  return doc.dump(2);
}

AlignmentResult result_from_json(const std::string& text) {
  AlignmentResult r;
  try {
    const json doc = json::parse(text);
    for (const auto& item : doc.at("per_second")) {
      SecondAlignment sa;
      sa.h_second = item.at("h_second").get<std::int64_t>();
      sa.similarity = item.at("similarity").get<double>();
      sa.status = status_from_string(item.at("status").get<std::string>());
      if (item.contains("g_frame")) sa.g_frame = item.at("g_frame").get<std::int64_t>();
      r.per_second.push_back(sa);
    }
    for (const auto& pair : doc.at("frame_matches"))
      r.frame_matches[pair.at(0).get<std::int64_t>()] = pair.at(1).get<std::int64_t>();
    for (const auto& span : doc.at("moments"))
      r.moments.push_back({span.at(0).get<std::int64_t>(), span.at(1).get<std::int64_t>()});
    r.localized_fraction = doc.at("localized_fraction").get<double>();
    r.matched_frame_count = doc.value("matched_frame_count", std::int64_t{0});
    const auto& cfg = doc.at("config");
    r.config.sim_threshold = cfg.at("sim_threshold").get<double>();
    r.config.candidate_threshold = cfg.at("candidate_threshold").get<double>();
    r.config.separation = cfg.at("separation").get<double>();
    r.config.dense_window = cfg.at("dense_window").get<double>();
    r.config.monotonic = cfg.at("monotonic").get<bool>();
    r.config.step2_cap = cfg.value("step2_cap", 120.0);
    r.config.use_multiscale = cfg.value("use_multiscale", true);
    if (doc.contains("stats")) {
      const auto& st = doc.at("stats");
      r.stats.ssim_evals = st.value("ssim_evals", std::int64_t{0});
      r.stats.coarse_evals = st.value("coarse_evals", std::int64_t{0});
      r.stats.refine_evals = st.value("refine_evals", std::int64_t{0});
      r.stats.prune_evals = st.value("prune_evals", std::int64_t{0});
      r.stats.dense_evals = st.value("dense_evals", std::int64_t{0});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("alignment result: bad JSON: ") + e.what());
  }
  return r;
}

}  // namespace moments::localizer
