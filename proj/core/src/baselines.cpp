#include "moments/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

using nlohmann::json;

namespace moments::baselines {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (unsigned char ch : text) {
    if (std::ispunct(ch))
      cleaned += ' ';
    else
      cleaned += static_cast<char>(std::tolower(ch));
  }
  std::vector<std::string> tokens;
  std::istringstream in(cleaned);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

FeatureMatrix ngram_features(const std::vector<std::string>& texts, const NgramOptions& opts) {
  if (opts.n_lo > opts.n_hi || opts.n_lo < 1)
    throw ConfigError("ngram_features: invalid n-gram range");
  if (texts.empty()) throw EmptyCorpus("ngram_features: no documents");

  // Per-document n-gram counts, plus document frequencies.
  std::vector<std::map<std::string, double>> doc_counts(texts.size());
  std::map<std::string, std::int64_t> df;
  for (std::size_t d = 0; d < texts.size(); ++d) {
    const auto tokens = tokenize(texts[d]);
    for (int n = opts.n_lo; n <= opts.n_hi; ++n) {
      if (static_cast<std::size_t>(n) > tokens.size()) break;
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (int k = 1; k < n; ++k) gram += ' ' + tokens[i + k];
        doc_counts[d][gram] += 1.0;
      }
    }
    for (const auto& [gram, count] : doc_counts[d]) ++df[gram];
  }

  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (const auto& [gram, freq] : df)
    if (freq >= opts.min_df) kept.emplace_back(gram, freq);
  if (kept.empty()) throw EmptyCorpus("ngram_features: vocabulary empty after min_df filter");
  if (kept.size() > opts.vocab_cap) {
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    kept.resize(opts.vocab_cap);
  }
  std::sort(kept.begin(), kept.end());  // final order: lexicographic

  FeatureMatrix X;
  X.rows = texts.size();
  X.dim = kept.size();
  X.values.assign(X.rows * X.dim, 0.0);
  X.feature_names.reserve(kept.size());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    X.feature_names.push_back(kept[i].first);
    index[kept[i].first] = i;
  }
  for (std::size_t d = 0; d < texts.size(); ++d)
    for (const auto& [gram, count] : doc_counts[d])
      if (auto it = index.find(gram); it != index.end()) X.at(d, it->second) = count;
  return X;
}

namespace {

void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

std::vector<double> mfcc_features(const std::vector<double>& waveform, double sample_rate,
                                  const MfccOptions& opts) {
  if (sample_rate <= 0) throw ConfigError("mfcc_features: sample_rate must be positive");
  const auto frame_len = static_cast<std::size_t>(std::llround(opts.frame_seconds * sample_rate));
  const auto hop = static_cast<std::size_t>(std::llround(opts.hop_seconds * sample_rate));
  if (frame_len < 2 || hop < 1) throw ConfigError("mfcc_features: degenerate framing");
  if (waveform.size() < frame_len)
    throw TooShort("mfcc_features: signal shorter than one analysis frame");

  std::vector<double> emphasized(waveform.size());
  emphasized[0] = waveform[0];
  for (std::size_t i = 1; i < waveform.size(); ++i)
    emphasized[i] = waveform[i] - opts.preemphasis * waveform[i - 1];

  std::size_t nfft = 1;
  while (nfft < frame_len) nfft <<= 1;
  const std::size_t bins = nfft / 2 + 1;

  // Triangular mel filterbank over [0, sr/2].
  const int nf = opts.mel_filters;
  std::vector<double> mel_points(nf + 2);
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  for (int i = 0; i < nf + 2; ++i) mel_points[i] = mel_to_hz(mel_hi * i / (nf + 1));
  std::vector<std::size_t> bin_points(nf + 2);
  for (int i = 0; i < nf + 2; ++i)
    bin_points[i] = static_cast<std::size_t>(
        std::floor((nfft + 1) * mel_points[i] / sample_rate));

  std::vector<double> window(frame_len);
  for (std::size_t i = 0; i < frame_len; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                       static_cast<double>(frame_len - 1));

  const int nc = opts.coefficients;
  const std::size_t n_frames = 1 + (waveform.size() - frame_len) / hop;
  std::vector<double> mean(nc, 0.0), meansq(nc, 0.0);
  std::vector<std::complex<double>> spec(nfft);
  std::vector<double> energies(nf), logs(nf);

  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t off = f * hop;
    for (std::size_t i = 0; i < nfft; ++i)
      spec[i] = i < frame_len ? emphasized[off + i] * window[i] : 0.0;
    fft_radix2(spec);

    for (int m = 0; m < nf; ++m) {
      const std::size_t lo = bin_points[m], mid = bin_points[m + 1], hi = bin_points[m + 2];
      double e = 0.0;
      for (std::size_t b = lo; b < hi && b < bins; ++b) {
        double w = 0.0;
        if (b >= lo && b <= mid && mid > lo)
          w = static_cast<double>(b - lo) / static_cast<double>(mid - lo);
        else if (b > mid && hi > mid)
          w = static_cast<double>(hi - b) / static_cast<double>(hi - mid);
        e += w * std::abs(spec[b]);
      }
      energies[m] = e;
    }
    for (int m = 0; m < nf; ++m) logs[m] = std::log(std::max(energies[m], opts.log_floor));

    // Orthonormal DCT-II, coefficients 0..nc-1.
    for (int c = 0; c < nc; ++c) {
      double acc = 0.0;
      for (int m = 0; m < nf; ++m)
        acc += logs[m] * std::cos(std::numbers::pi * c * (2.0 * m + 1.0) / (2.0 * nf));
      const double norm = c == 0 ? std::sqrt(1.0 / nf) : std::sqrt(2.0 / nf);
      acc *= norm;
      mean[c] += acc;
      meansq[c] += acc * acc;
    }
  }
  for (int c = 0; c < nc; ++c) {
    mean[c] /= static_cast<double>(n_frames);
    meansq[c] /= static_cast<double>(n_frames);
  }
  if (!opts.append_std) return mean;
  std::vector<double> out = mean;
  for (int c = 0; c < nc; ++c)
    out.push_back(std::sqrt(std::max(0.0, meansq[c] - mean[c] * mean[c])));
  return out;
}

FeatureMatrix avg_embedding_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("avg_embedding_features: cannot open " + path);
  FeatureMatrix X;
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto& frames = j.at("frames");
      if (frames.empty()) throw ParseError("avg_embedding_features: moment with no frames");
      std::vector<double> mean;
      for (const auto& frame : frames) {
        if (mean.empty()) mean.assign(frame.size(), 0.0);
        if (frame.size() != mean.size())
          throw InconsistentDim("avg_embedding_features: frame dims differ within " +
                                j.at("moment_id").get<std::string>());
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += frame.at(i).get<double>();
      }
      for (auto& v : mean) v /= static_cast<double>(frames.size());
      if (!rows.empty() && mean.size() != rows.front().size())
        throw InconsistentDim("avg_embedding_features: embedding dims differ across moments");
      X.row_ids.push_back(j.at("moment_id").get<std::string>());
      rows.push_back(std::move(mean));
    } catch (const json::exception& e) {
      throw ParseError("avg_embedding_features: bad JSONL at " + path + ":" +
                       std::to_string(lineno) + ": " + e.what());
    }
  }
  if (rows.empty()) throw EmptyCorpus("avg_embedding_features: no moments in " + path);
  X.rows = rows.size();
  X.dim = rows.front().size();
  X.values.reserve(X.rows * X.dim);
  for (const auto& r : rows) X.values.insert(X.values.end(), r.begin(), r.end());
  return X;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_3to1(
    const std::vector<std::string>& ids, const std::vector<int>& labels, std::uint64_t seed) {
  if (ids.size() != labels.size())
    throw DataError("split_3to1: ids and labels differ in length");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < ids.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [cls, members] : by_class)
    if (members.size() < 4)
      throw TooFewPerClass("split_3to1: class " + std::to_string(cls) +
                           " has fewer than 4 samples");
  std::mt19937_64 rng(seed);
  std::vector<std::string> train, test;
  for (auto& [cls, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t n_test = members.size() / 4;
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < n_test ? test : train).push_back(ids[members[i]]);
  }
  return {std::move(train), std::move(test)};
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double log1pexp(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_training_inputs(const FeatureMatrix& X, const std::vector<int>& y) {
  if (X.rows != y.size()) throw DataError("train_logreg: rows != |y|");
  if (X.rows == 0) throw EmptyInput("train_logreg: no rows");
  for (double v : X.values)
    if (!std::isfinite(v)) throw NonFiniteFeature("train_logreg: non-finite feature value");
  const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
  const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
  if (!has0 || !has1) throw SingleClass("train_logreg: both classes required");
}

}  // namespace

double logreg_loss(const FeatureMatrix& X, const std::vector<int>& y,
                   const std::vector<double>& w, double b, double l2) {
  double loss = 0.0;
  for (std::size_t r = 0; r < X.rows; ++r) {
    double z = b;
    for (std::size_t c = 0; c < X.dim; ++c) z += w[c] * X.at(r, c);
    loss += log1pexp(z) - y[r] * z;
  }
  loss /= static_cast<double>(X.rows);
  double reg = 0.0;
  for (double v : w) reg += v * v;
  return loss + 0.5 * l2 * reg;
}

std::vector<double> logreg_gradient(const FeatureMatrix& X, const std::vector<int>& y,
                                    const std::vector<double>& w, double b, double l2) {
  std::vector<double> grad(X.dim + 1, 0.0);  // weights..., bias
  for (std::size_t r = 0; r < X.rows; ++r) {
    double z = b;
    for (std::size_t c = 0; c < X.dim; ++c) z += w[c] * X.at(r, c);
    const double residual = sigmoid(z) - y[r];
    for (std::size_t c = 0; c < X.dim; ++c) grad[c] += residual * X.at(r, c);
    grad[X.dim] += residual;
  }
  for (auto& g : grad) g /= static_cast<double>(X.rows);
  for (std::size_t c = 0; c < X.dim; ++c) grad[c] += l2 * w[c];
  return grad;
}

LogRegModel train_logreg(const FeatureMatrix& X, const std::vector<int>& y,
                         const TrainOptions& opts) {
  check_training_inputs(X, y);
  LogRegModel m;
  m.weights.assign(X.dim, 0.0);
  m.bias = 0.0;
  m.l2 = opts.l2;

  double loss = logreg_loss(X, y, m.weights, m.bias, opts.l2);
  double step = 1.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const auto grad = logreg_gradient(X, y, m.weights, m.bias, opts.l2);
    double gmax = 0.0, gnorm2 = 0.0;
    for (double g : grad) {
      gmax = std::max(gmax, std::abs(g));
      gnorm2 += g * g;
    }
    m.iterations = it;
    if (gmax < opts.tol) {
      m.converged = true;
      break;
    }
    // Backtracking line search (Armijo).
    double t = step;
    std::vector<double> cw(X.dim);
    double cb = 0.0, new_loss = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t c = 0; c < X.dim; ++c) cw[c] = m.weights[c] - t * grad[c];
      cb = m.bias - t * grad[X.dim];
      new_loss = logreg_loss(X, y, cw, cb, opts.l2);
      if (new_loss <= loss - 1e-4 * t * gnorm2) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // step underflow; gradient numerically flat
    m.weights = cw;
    m.bias = cb;
    loss = new_loss;
    step = std::min(1.0, t * 2.0);  // mild step recovery
  }
  return m;
}

Predictions predict_logreg(const LogRegModel& m, const FeatureMatrix& X) {
  if (X.dim != m.weights.size())
    throw DimMismatch("predict_logreg: feature dim does not match model");
  Predictions out;
  out.labels.reserve(X.rows);
  out.probs.reserve(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) {
    double z = m.bias;
    for (std::size_t c = 0; c < X.dim; ++c) z += m.weights[c] * X.at(r, c);
    const double p = sigmoid(z);
    out.probs.push_back(p);
    out.labels.push_back(p >= 0.5 ? 1 : 0);
  }
  return out;
}

void save_model(const LogRegModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("save_model: cannot write " + path);
  out << json{{"weights", m.weights},
              {"bias", m.bias},
              {"l2", m.l2},
              {"feature_spec", m.feature_spec},
              {"converged", m.converged},
              {"iterations", m.iterations}}
             .dump(2);
}

LogRegModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("load_model: cannot open " + path);
  try {
    const json j = json::parse(in);
    LogRegModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.l2 = j.value("l2", 1.0);
    m.feature_spec = j.value("feature_spec", "");
    m.converged = j.value("converged", false);
    m.iterations = j.value("iterations", 0);
    return m;
  } catch (const json::exception& e) {
    throw ParseError("load_model: bad model JSON in " + path + ": " + e.what());
  }
}

}  // namespace moments::baselines
