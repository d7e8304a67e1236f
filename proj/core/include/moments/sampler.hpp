#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "moments/moment_record.hpp"
#include "moments/types.hpp"

namespace moments::sampler {

struct GammaParams {
  double shape = 1.0;  // k
  double scale = 1.0;  // theta, seconds

  double mean() const { return shape * scale; }
  double variance() const { return shape * scale * scale; }
};

struct DurationSummary {
  std::string label;     // class ("important" / "non_important")
  std::string modality;  // "video" / "audio"
  std::int64_t count = 0;
  double mean = 0.0;  // t-bar, seconds
  double min = 0.0;
  double max = 0.0;
};

// Method-of-moments estimate: k = m^2/v, theta = v/m.
GammaParams fit_gamma_moments(const std::vector<double>& durations);

// Maximum-likelihood fit: method-of-moments start, Newton refinement of k
// on the digamma equation, theta = mean / k.
GammaParams fit_gamma_mle(const std::vector<double>& durations);

// n i.i.d. Gamma(k, theta) draws (Marsaglia-Tsang), deterministic per seed,
// clamped to [1, 300] seconds.
std::vector<double> sample_durations(const GammaParams& p, std::size_t n, std::uint64_t seed);

struct PlacementResult {
  std::vector<TimeSpan> placed;
  std::size_t unplaced = 0;  // durations that fit in no remaining gap
};

// Places duration-matched spans inside the gaps of [0, g_duration] left by
// the important spans, longest duration first, offsets uniform over the
// feasible range per seeded generator. A 1 s margin is kept around every
// important span.
PlacementResult place_nonimportant(double g_duration, const std::vector<TimeSpan>& important,
                                   const std::vector<double>& durations, std::uint64_t seed);

// Per class x modality duration summaries (t-bar per Fig.-4-style tables).
std::vector<DurationSummary> duration_summary(const std::vector<MomentRecord>& moments);

// digamma / trigamma, exposed for the fit tests.
double digamma(double x);
double trigamma(double x);

}  // namespace moments::sampler
