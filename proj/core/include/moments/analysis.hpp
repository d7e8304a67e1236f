#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "moments/types.hpp"

namespace moments::analysis {

struct LengthMismatch : DataError { using DataError::DataError; };
struct OneClassOnly : DataError { using DataError::DataError; };
struct MissingCombination : DataError { using DataError::DataError; };
struct TooFewValidResamples : DataError { using DataError::DataError; };

struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::int64_t total() const { return tp + fp + tn + fn; }
};

ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& labels);

double mcc(const ConfusionCounts& c);
double accuracy(const ConfusionCounts& c);
double f1(const ConfusionCounts& c);

// Mann-Whitney rank statistic; ties count 0.5.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct BootstrapCi {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t skipped = 0;  // resamples where the metric was undefined
};

using PairMetric = std::function<double(const std::vector<int>& preds,
                                        const std::vector<int>& labels)>;

// Percentile (1-level) interval over B seeded resamples with replacement.
BootstrapCi bootstrap_ci(const PairMetric& metric, const std::vector<int>& preds,
                         const std::vector<int>& labels, std::size_t B = 1000,
                         double level = 0.95, std::uint64_t seed = 0);

// Per-combination logits; a precomputed delta may be stored as
// {z_true = dz, z_false = 0}.
struct LogitEntry {
  double z_true = 0.0;
  double z_false = 0.0;
};

struct LogitRecord {
  std::string moment_id;
  int ground_truth = 0;
  std::map<std::string, LogitEntry> entries;  // key: combination, e.g. "LV"
};

double delta_z(const LogitEntry& e);

enum class ClassSlice { Important, NonImportant, All };

struct ContributionReport {
  std::string modality;
  ClassSlice slice = ClassSlice::All;
  double score = 0.0;  // summed over the slice
  std::int64_t n = 0;
  bool normalized = false;
};

// Modality contribution: sum of delta-Z over combinations containing the
// modality minus sum over combinations excluding it, summed across records
// in the slice. The normalized variant divides each of the two sums by its
// combination count first.
ContributionReport contribution(const std::vector<LogitRecord>& records, char modality,
                                const std::set<std::string>& combos, ClassSlice slice,
                                bool normalized = false);

// Records categorized reliably: delta-Z above threshold for every declared
// unimodal combination.
std::vector<LogitRecord> reliable_type_filter(const std::vector<LogitRecord>& records,
                                              const std::vector<std::string>& unimodal,
                                              double threshold = 3.0);

struct ConfidencePair {
  std::string moment_id;
  double best_unimodal_dz = 0.0;
  double best_multimodal_dz = 0.0;
  int ground_truth = 0;
};

// Optimal unimodal vs optimal multimodal confidence per record.
std::vector<ConfidencePair> confidence_pairs(const std::vector<LogitRecord>& records);

// JSONL I/O for logit records:
// {"moment_id":str,"ground_truth":0|1,"entries":{"V":{"z_true":f,"z_false":f},...}}
std::vector<LogitRecord> read_logit_records(const std::string& path);
void write_logit_records(const std::string& path, const std::vector<LogitRecord>& records);

}  // namespace moments::analysis
