#include "moments/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

using nlohmann::json;

namespace moments::analysis {

ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.size() != labels.size())
    throw LengthMismatch("confusion: preds and labels differ in length");
  if (preds.empty()) throw EmptyInput("confusion: empty inputs");
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] == 1)
      preds[i] == 1 ? ++c.tp : ++c.fn;
    else
      preds[i] == 1 ? ++c.fp : ++c.tn;
  }
  return c;
}

double mcc(const ConfusionCounts& c) {
  if (c.total() <= 0) throw EmptyInput("mcc: empty confusion counts");
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() <= 0) throw EmptyInput("accuracy: empty confusion counts");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double f1(const ConfusionCounts& c) {
  if (c.total() <= 0) throw EmptyInput("f1: empty confusion counts");
  const double denom = static_cast<double>(2 * c.tp + c.fp + c.fn);
  if (denom == 0.0) return 0.0;
  return 2.0 * static_cast<double>(c.tp) / denom;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw LengthMismatch("roc_auc: scores and labels differ in length");
  double pos = 0, neg = 0, wins = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] == 1) continue;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  for (int l : labels) (l == 1 ? pos : neg) += 1.0;
  if (pos == 0 || neg == 0) throw OneClassOnly("roc_auc: both classes required");
  return wins / (pos * neg);
}

BootstrapCi bootstrap_ci(const PairMetric& metric, const std::vector<int>& preds,
                         const std::vector<int>& labels, std::size_t B, double level,
                         std::uint64_t seed) {
  if (preds.size() != labels.size())
    throw LengthMismatch("bootstrap_ci: preds and labels differ in length");
  if (preds.empty()) throw EmptyInput("bootstrap_ci: empty inputs");

  const std::size_t n = preds.size();
  std::vector<double> values;
  values.reserve(B);
  BootstrapCi ci;
  std::vector<int> rp(n), rl(n);
  for (std::size_t b = 0; b < B; ++b) {
    // Per-resample seed derived from (seed, resample index).
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + b + 1);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = pick(rng);
      rp[i] = preds[j];
      rl[i] = labels[j];
    }
    try {
      values.push_back(metric(rp, rl));
    } catch (const MomentsError&) {
      ++ci.skipped;
    }
  }
  if (values.size() < B / 2)
    throw TooFewValidResamples("bootstrap_ci: metric undefined on most resamples");
  std::sort(values.begin(), values.end());
  const double alpha = (1.0 - level) / 2.0;
  const auto pick_q = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  ci.lo = pick_q(alpha);
  ci.hi = pick_q(1.0 - alpha);
  return ci;
}

double delta_z(const LogitEntry& e) {
  if (!std::isfinite(e.z_true) || !std::isfinite(e.z_false))
    throw DataError("delta_z: non-finite logits");
  return e.z_true - e.z_false;
}

namespace {

bool in_slice(const LogitRecord& r, ClassSlice slice) {
  switch (slice) {
    case ClassSlice::Important: return r.ground_truth == 1;
    case ClassSlice::NonImportant: return r.ground_truth == 0;
    case ClassSlice::All: return true;
  }
  return false;
}

}  // namespace

ContributionReport contribution(const std::vector<LogitRecord>& records, char modality,
                                const std::set<std::string>& combos, ClassSlice slice,
                                bool normalized) {
  ContributionReport report;
  report.modality = std::string(1, modality);
  report.slice = slice;
  report.normalized = normalized;

  double n_inc = 0, n_exc = 0;
  for (const auto& c : combos) (c.find(modality) != std::string::npos ? n_inc : n_exc) += 1.0;

  for (const auto& r : records) {
    if (!in_slice(r, slice)) continue;
    double inc = 0.0, exc = 0.0;
    for (const auto& c : combos) {
      const auto it = r.entries.find(c);
      if (it == r.entries.end())
        throw MissingCombination("contribution: record " + r.moment_id +
                                 " lacks combination " + c);
      const double dz = delta_z(it->second);
      (c.find(modality) != std::string::npos ? inc : exc) += dz;
    }
    if (normalized) {
      if (n_inc > 0) inc /= n_inc;
      if (n_exc > 0) exc /= n_exc;
    }
    report.score += inc - exc;
    ++report.n;
  }
  if (report.n == 0) throw EmptyInput("contribution: empty class slice");
  return report;
}

std::vector<LogitRecord> reliable_type_filter(const std::vector<LogitRecord>& records,
                                              const std::vector<std::string>& unimodal,
                                              double threshold) {
  std::vector<LogitRecord> kept;
  for (const auto& r : records) {
    bool ok = true;
    for (const auto& m : unimodal) {
      const auto it = r.entries.find(m);
      if (it == r.entries.end())
        throw MissingCombination("reliable_type_filter: record " + r.moment_id +
                                 " lacks unimodal combination " + m);
      if (!(delta_z(it->second) > threshold)) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(r);
  }
  return kept;
}

std::vector<ConfidencePair> confidence_pairs(const std::vector<LogitRecord>& records) {
  std::vector<ConfidencePair> out;
  for (const auto& r : records) {
    bool have_uni = false, have_multi = false;
    ConfidencePair p;
    p.moment_id = r.moment_id;
    p.ground_truth = r.ground_truth;
    for (const auto& [combo, entry] : r.entries) {
      const double dz = delta_z(entry);
      if (combo.size() == 1) {
        if (!have_uni || dz > p.best_unimodal_dz) p.best_unimodal_dz = dz;
        have_uni = true;
      } else {
        if (!have_multi || dz > p.best_multimodal_dz) p.best_multimodal_dz = dz;
        have_multi = true;
      }
    }
    if (!have_uni || !have_multi)
      throw MissingCombination("confidence_pairs: record " + r.moment_id +
                               " needs at least one unimodal and one multimodal entry");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<LogitRecord> read_logit_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("read_logit_records: cannot open " + path);
  std::vector<LogitRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      LogitRecord r;
      r.moment_id = j.at("moment_id").get<std::string>();
      r.ground_truth = j.at("ground_truth").get<int>();
      for (const auto& [combo, entry] : j.at("entries").items()) {
        LogitEntry e;
        if (entry.is_object()) {
          e.z_true = entry.at("z_true").get<double>();
          e.z_false = entry.at("z_false").get<double>();
        } else {
          // Bare number: a precomputed delta-Z.
          e.z_true = entry.get<double>();
          e.z_false = 0.0;
        }
        r.entries[combo] = e;
      }
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError("read_logit_records: bad JSON at " + path + ":" +
                       std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

void write_logit_records(const std::string& path, const std::vector<LogitRecord>& records) {
  std::ofstream out(path);
  if (!out) throw DataError("write_logit_records: cannot write " + path);
  for (const auto& r : records) {
    json entries = json::object();
    for (const auto& [combo, e] : r.entries)
      entries[combo] = {{"z_true", e.z_true}, {"z_false", e.z_false}};
    out << json{{"moment_id", r.moment_id},
                {"ground_truth", r.ground_truth},
                {"entries", std::move(entries)}}
               .dump()
        << "\n";
  }
}

}  // namespace moments::analysis
