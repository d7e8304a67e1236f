#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "moments/types.hpp"

namespace moments::baselines {

struct EmptyCorpus : DataError { using DataError::DataError; };
struct TooShort : DataError { using DataError::DataError; };
struct InconsistentDim : DataError { using DataError::DataError; };
struct TooFewPerClass : DataError { using DataError::DataError; };
struct SingleClass : DataError { using DataError::DataError; };
struct DimMismatch : DataError { using DataError::DataError; };
struct NonFiniteFeature : DataError { using DataError::DataError; };

struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // row-major, rows * dim
  std::vector<std::string> row_ids;
  std::vector<std::string> feature_names;

  double at(std::size_t r, std::size_t c) const { return values[r * dim + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * dim + c]; }
};

struct NgramOptions {
  int n_lo = 1;
  int n_hi = 4;
  int min_df = 2;
  std::size_t vocab_cap = 50000;  // top n-grams by document frequency
};

// Count features over lowercase, punctuation-stripped, whitespace-split
// n-grams; vocabulary ordered lexicographically.
FeatureMatrix ngram_features(const std::vector<std::string>& texts,
                             const NgramOptions& opts = {});

struct MfccOptions {
  double preemphasis = 0.97;
  double frame_seconds = 0.025;
  double hop_seconds = 0.010;
  int mel_filters = 26;
  int coefficients = 20;
  double log_floor = 1e-10;
  bool append_std = false;  // mean+std (2x dim) instead of mean only
};

// Mean (optionally mean+std) of per-frame MFCC vectors: pre-emphasis,
// Hamming-windowed frames, magnitude spectrum, mel filterbank, log, DCT-II
// orthonormal, first `coefficients` kept.
std::vector<double> mfcc_features(const std::vector<double>& waveform, double sample_rate,
                                  const MfccOptions& opts = {});

// Per-moment mean of per-frame embedding vectors, read from JSONL
// {"moment_id":str,"frames":[[f,...],...]}.
FeatureMatrix avg_embedding_features(const std::string& path);

// Stratified 75/25 split, deterministic per seed.
std::pair<std::vector<std::string>, std::vector<std::string>> split_3to1(
    const std::vector<std::string>& ids, const std::vector<int>& labels, std::uint64_t seed);

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 1.0;
  std::string feature_spec;
  bool converged = false;
  int iterations = 0;
};

struct TrainOptions {
  double l2 = 1.0;
  int max_iter = 500;
  double tol = 1e-6;
};

// Full-batch gradient descent with backtracking line search on the
// L2-regularized negative log-likelihood (mean over rows).
LogRegModel train_logreg(const FeatureMatrix& X, const std::vector<int>& y,
                         const TrainOptions& opts = {});

struct Predictions {
  std::vector<int> labels;
  std::vector<double> probs;
};

Predictions predict_logreg(const LogRegModel& m, const FeatureMatrix& X);

// Regularized mean negative log-likelihood and its gradient
// (d/d[weights..., bias]); exposed for the finite-difference check.
double logreg_loss(const FeatureMatrix& X, const std::vector<int>& y,
                   const std::vector<double>& w, double b, double l2);
std::vector<double> logreg_gradient(const FeatureMatrix& X, const std::vector<int>& y,
                                    const std::vector<double>& w, double b, double l2);

// Model persistence (JSON with the feature spec).
void save_model(const LogRegModel& m, const std::string& path);
LogRegModel load_model(const std::string& path);

}  // namespace moments::baselines
