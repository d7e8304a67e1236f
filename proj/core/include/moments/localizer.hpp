#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moments/frame_source.hpp"
#include "moments/ssim.hpp"
#include "moments/types.hpp"

namespace moments::localizer {

enum class LocalizationStatus { WellLocalized, PoorlyLocalized, Unmatched };

std::string to_string(LocalizationStatus s);
LocalizationStatus status_from_string(const std::string& s);

struct SecondAlignment {
  std::int64_t h_second = 0;
  std::optional<std::int64_t> g_frame;
  double similarity = -1.0;
  LocalizationStatus status = LocalizationStatus::Unmatched;
};

struct LocalizerConfig {
  double sim_threshold = 0.8;
  double candidate_threshold = 0.8;
  double separation = 1.0;    // seconds; moment grouping adjacency
  double dense_window = 2.0;  // seconds; step-3 search radius
  bool monotonic = true;      // highlights preserve game order (step-2 windowing)
  double step2_cap = 120.0;   // seconds; search bound when a neighbor is missing
  bool use_multiscale = true;
  ssim::SsimParams ssim_params;
};

struct AlignmentStats {
  std::int64_t ssim_evals = 0;
  std::int64_t coarse_evals = 0;
  std::int64_t refine_evals = 0;
  std::int64_t prune_evals = 0;
  std::int64_t dense_evals = 0;
};

struct AlignmentResult {
  std::vector<SecondAlignment> per_second;
  std::map<std::int64_t, std::int64_t> frame_matches;  // H frame -> G frame
  std::vector<FrameSpan> moments;                      // over G, disjoint, sorted
  double localized_fraction = 0.0;                     // WellLocalized seconds / H seconds
  std::int64_t matched_frame_count = 0;
  LocalizerConfig config;
  AlignmentStats stats;
};

// Counting wrapper around the configured frame comparator.
class Similarity {
 public:
  explicit Similarity(const LocalizerConfig& cfg) : cfg_(cfg) {}
  double operator()(const GrayFrame& a, const GrayFrame& b);
  std::int64_t evals() const { return evals_; }

 private:
  const LocalizerConfig& cfg_;
  std::int64_t evals_ = 0;
};

// Step 1, phase A: G seconds whose representative frame matches the H
// anchor at or above candidate_threshold, sorted by descending similarity
// (ties: lower second first).
std::vector<std::int64_t> coarse_candidates(const GrayFrame& h_anchor,
                                            const std::vector<std::pair<std::int64_t, GrayFrame>>& g_reps,
                                            const LocalizerConfig& cfg, Similarity& sim);

// Step 1, phase B: best native-FPS frame over the candidate seconds.
SecondAlignment refine_within_seconds(const GrayFrame& h_anchor, FrameSource& g,
                                      const std::vector<std::int64_t>& candidate_seconds,
                                      const LocalizerConfig& cfg, Similarity& sim);

// Step 2: re-search poorly-localized/unmatched seconds between their
// nearest well-localized neighbors. Never demotes or worsens an entry.
std::vector<SecondAlignment> prune_and_relocalize(std::vector<SecondAlignment> alignments,
                                                  FrameSource& h, FrameSource& g,
                                                  const LocalizerConfig& cfg, Similarity& sim);

// Step 3: per-frame matches within dense_window of each well-localized
// second's anchor match.
std::map<std::int64_t, std::int64_t> dense_match(const std::vector<SecondAlignment>& alignments,
                                                 FrameSource& h, FrameSource& g,
                                                 const LocalizerConfig& cfg, Similarity& sim);

// Groups matched G indices into maximal runs whose consecutive gaps are at
// most separation seconds; each run becomes one half-open span.
std::vector<FrameSpan> group_moments(const std::vector<std::int64_t>& g_indices,
                                     const Rational& fps_g, double separation);

using ProgressFn = std::function<void(const std::string&)>;

// Full three-step hierarchical localization of H in G.
AlignmentResult localize(FrameSource& h, FrameSource& g, const LocalizerConfig& cfg = {},
                         const ProgressFn& progress = {});

// JSON (de)serialization of results, schema per the pipeline artifact contract.
std::string to_json(const AlignmentResult& result);
AlignmentResult result_from_json(const std::string& text);

}  // namespace moments::localizer
