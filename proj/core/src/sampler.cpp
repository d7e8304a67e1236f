#include "moments/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace moments::sampler {

namespace {

constexpr double kMinDuration = 1.0;
constexpr double kMaxDuration = 300.0;
constexpr double kImMargin = 1.0;  // seconds kept clear around important spans

void check_durations(const std::vector<double>& d) {
  if (d.size() < 2) throw DegenerateData("gamma fit: need at least 2 samples");
  for (double v : d)
    if (!(v > 0.0)) throw DegenerateData("gamma fit: durations must be positive");
}

double sample_mean(const std::vector<double>& d) {
  return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

}  // namespace

double digamma(double x) {
  // Recurrence up to x >= 6, then the asymptotic series.
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
  return result;
}

double trigamma(double x) {
  double result = 0.0;
  while (x < 6.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += inv * (1.0 + 0.5 * inv +
                   inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0))));
  return result;
}

GammaParams fit_gamma_moments(const std::vector<double>& durations) {
  check_durations(durations);
  const double m = sample_mean(durations);
  double v = 0.0;
  for (double d : durations) v += (d - m) * (d - m);
  v /= static_cast<double>(durations.size());
  if (v <= 0.0) throw DegenerateData("gamma fit: zero variance");
  return {m * m / v, v / m};
}

GammaParams fit_gamma_mle(const std::vector<double>& durations) {
  GammaParams p = fit_gamma_moments(durations);
  const double m = sample_mean(durations);
  double log_mean = 0.0;
  for (double d : durations) log_mean += std::log(d);
  log_mean /= static_cast<double>(durations.size());
  const double s = std::log(m) - log_mean;  // >= 0 by Jensen

  // Newton on f(k) = log(k) - digamma(k) - s.
  double k = p.shape;
  for (int it = 0; it < 100; ++it) {
    const double f = std::log(k) - digamma(k) - s;
    const double fp = 1.0 / k - trigamma(k);
    const double step = f / fp;
    double next = k - step;
    if (next <= 0.0) next = k / 2.0;  // stay in the domain
    const double delta = std::abs(next - k);
    k = next;
    if (delta < 1e-8) break;
  }
  if (!std::isfinite(k) || k <= 0.0) throw DegenerateData("gamma fit: MLE did not converge");
  return {k, m / k};
}

std::vector<double> sample_durations(const GammaParams& p, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  // Marsaglia-Tsang squeeze method; shape < 1 handled via the boost
  // Gamma(k+1) * U^(1/k).
  const auto draw_shape_ge1 = [&](double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal(rng);
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform(rng);
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  };

  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double g;
    if (p.shape >= 1.0) {
      g = draw_shape_ge1(p.shape);
    } else {
      const double boost = std::pow(uniform(rng), 1.0 / p.shape);
      g = draw_shape_ge1(p.shape + 1.0) * boost;
    }
    out.push_back(std::clamp(g * p.scale, kMinDuration, kMaxDuration));
  }
  return out;
}

PlacementResult place_nonimportant(double g_duration, const std::vector<TimeSpan>& important,
                                   const std::vector<double>& durations, std::uint64_t seed) {
  for (const auto& span : important)
    if (!span.valid() || span.end > g_duration + 1e-9)
      throw SpanOutOfRange("place_nonimportant: important span outside [0, g_duration]");

  // Free gaps after padding important spans with the margin.
  std::vector<TimeSpan> sorted_im = important;
  std::sort(sorted_im.begin(), sorted_im.end(),
            [](const TimeSpan& a, const TimeSpan& b) { return a.start < b.start; });
  std::vector<TimeSpan> gaps;
  double cursor = 0.0;
  for (const auto& span : sorted_im) {
    const double lo = std::max(0.0, span.start - kImMargin);
    if (lo > cursor) gaps.push_back({cursor, lo});
    cursor = std::max(cursor, std::min(g_duration, span.end + kImMargin));
  }
  if (cursor < g_duration) gaps.push_back({cursor, g_duration});

  std::vector<double> ordered = durations;
  std::sort(ordered.begin(), ordered.end(), std::greater<>());

  std::mt19937_64 rng(seed);
  PlacementResult result;
  for (double dur : ordered) {
    // Feasible start offsets across all gaps that can hold this duration.
    std::vector<std::pair<std::size_t, double>> feasible;  // gap index, slack
    double total = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      const double slack = gaps[i].length() - dur;
      if (slack >= 0.0) {
        feasible.emplace_back(i, slack);
        total += slack;
      }
    }
    if (feasible.empty()) {
      ++result.unplaced;
      continue;
    }
    std::size_t gap_idx;
    double offset;
    if (total <= 0.0) {
      // Exact fits only: pick uniformly among them.
      std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
      gap_idx = feasible[pick(rng)].first;
      offset = 0.0;
    } else {
      std::uniform_real_distribution<double> pick(0.0, total);
      double u = pick(rng);
      gap_idx = feasible.back().first;
      offset = feasible.back().second;
      for (const auto& [idx, slack] : feasible) {
        if (u <= slack) {
          gap_idx = idx;
          offset = u;
          break;
        }
        u -= slack;
      }
    }
    const double start = gaps[gap_idx].start + offset;
    result.placed.push_back({start, start + dur});
    // Split the gap around the placed span.
    const TimeSpan old = gaps[gap_idx];
    gaps.erase(gaps.begin() + static_cast<std::ptrdiff_t>(gap_idx));
    if (start > old.start) gaps.push_back({old.start, start});
    if (start + dur < old.end) gaps.push_back({start + dur, old.end});
  }
  std::sort(result.placed.begin(), result.placed.end(),
            [](const TimeSpan& a, const TimeSpan& b) { return a.start < b.start; });
  return result;
}

std::vector<DurationSummary> duration_summary(const std::vector<MomentRecord>& moments) {
  if (moments.empty()) throw EmptyInput("duration_summary: no moments");
  std::vector<DurationSummary> out;
  for (const int label : {1, 0}) {
    for (const bool audio : {false, true}) {
      DurationSummary s;
      s.label = label == 1 ? "important" : "non_important";
      s.modality = audio ? "audio" : "video";
      s.min = std::numeric_limits<double>::infinity();
      s.max = -std::numeric_limits<double>::infinity();
      double sum = 0.0;
      for (const auto& m : moments) {
        if (m.label != label) continue;
        const double d = audio ? m.audio_span.length() : m.video_span.length();
        ++s.count;
        sum += d;
        s.min = std::min(s.min, d);
        s.max = std::max(s.max, d);
      }
      if (s.count == 0) continue;
      s.mean = sum / static_cast<double>(s.count);
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace moments::sampler
