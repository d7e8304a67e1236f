#include "moments/ssim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace moments::ssim {

void SsimParams::validate() const {
  if (window_size < 3 || window_size % 2 == 0)
    throw ConfigError("SsimParams: window_size must be odd and >= 3");
  if (k1 <= 0 || k2 <= 0)
    throw ConfigError("SsimParams: k1 and k2 must be positive");
  if (scale_weights.empty())
    throw ConfigError("SsimParams: scale_weights must be non-empty");
  double sum = 0.0;
  for (double w : scale_weights) {
    if (w <= 0) throw ConfigError("SsimParams: scale weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ConfigError("SsimParams: scale weights must sum to 1");
}

namespace {

std::vector<float> gaussian_kernel(int size, double sigma) {
  std::vector<float> k(size);
  const double c = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - c;
    k[i] = static_cast<float>(std::exp(-d * d / (2.0 * sigma * sigma)));
    sum += k[i];
  }
  for (auto& v : k) v = static_cast<float>(v / sum);
  return k;
}

// Valid-mode separable convolution. in: h x w, out: (h-t+1) x (w-t+1)
// where t is the tap count. tmp is a scratch buffer of size h x (w-t+1).
void filter_valid(const std::vector<float>& in, int w, int h,
                  const std::vector<float>& kernel,
                  std::vector<float>& tmp, std::vector<float>& out) {
  const int t = static_cast<int>(kernel.size());
  const int ow = w - t + 1;
  const int oh = h - t + 1;
  tmp.resize(static_cast<std::size_t>(h) * ow);
  out.resize(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < h; ++y) {
    const float* row = in.data() + static_cast<std::size_t>(y) * w;
    float* trow = tmp.data() + static_cast<std::size_t>(y) * ow;
    for (int x = 0; x < ow; ++x) {
      float acc = 0.0f;
      for (int i = 0; i < t; ++i) acc += kernel[i] * row[x + i];
      trow[x] = acc;
    }
  }
  for (int y = 0; y < oh; ++y) {
    float* orow = out.data() + static_cast<std::size_t>(y) * ow;
    for (int x = 0; x < ow; ++x) orow[x] = 0.0f;
    for (int i = 0; i < t; ++i) {
      const float kv = kernel[i];
      const float* trow = tmp.data() + static_cast<std::size_t>(y + i) * ow;
      for (int x = 0; x < ow; ++x) orow[x] += kv * trow[x];
    }
  }
}

struct Planes {
  std::vector<float> a, b, aa, bb, ab;
  int w = 0, h = 0;

  static Planes from_frames(const GrayFrame& fa, const GrayFrame& fb) {
    Planes pl;
    pl.w = fa.width;
    pl.h = fa.height;
    const std::size_t n = fa.pixels.size();
    pl.a.resize(n);
    pl.b.resize(n);
    pl.aa.resize(n);
    pl.bb.resize(n);
    pl.ab.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const float av = fa.pixels[i];
      const float bv = fb.pixels[i];
      pl.a[i] = av;
      pl.b[i] = bv;
      pl.aa[i] = av * av;
      pl.bb[i] = bv * bv;
      pl.ab[i] = av * bv;
    }
    return pl;
  }

  // 2x2 mean pool all planes (float, no rounding: this is the MS-SSIM
  // internal pyramid, distinct from the public downsample2x contract).
  void pool2x() {
    const int nw = w / 2;
    const int nh = h / 2;
    auto pool = [&](std::vector<float>& p) {
      std::vector<float> out(static_cast<std::size_t>(nw) * nh);
      for (int y = 0; y < nh; ++y)
        for (int x = 0; x < nw; ++x) {
          const std::size_t i0 = static_cast<std::size_t>(2 * y) * w + 2 * x;
          const std::size_t i1 = i0 + w;
          out[static_cast<std::size_t>(y) * nw + x] =
              0.25f * (p[i0] + p[i0 + 1] + p[i1] + p[i1 + 1]);
        }
      p = std::move(out);
    };
    pool(a);
    pool(b);
    w = nw;
    h = nh;
    // Products are rebuilt from the pooled intensities.
    const std::size_t n = a.size();
    aa.resize(n);
    bb.resize(n);
    ab.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      aa[i] = a[i] * a[i];
      bb[i] = b[i] * b[i];
      ab[i] = a[i] * b[i];
    }
  }
};

struct LevelStats {
  double mean_lcs = 0.0;  // mean of luminance*contrast*structure
  double mean_cs = 0.0;   // mean of contrast*structure
  double mean_l = 0.0;
};

LevelStats level_stats(const Planes& pl, const std::vector<float>& kernel,
                       double c1, double c2) {
  std::vector<float> tmp, mu_a, mu_b, mu_aa, mu_bb, mu_ab;
  filter_valid(pl.a, pl.w, pl.h, kernel, tmp, mu_a);
  filter_valid(pl.b, pl.w, pl.h, kernel, tmp, mu_b);
  filter_valid(pl.aa, pl.w, pl.h, kernel, tmp, mu_aa);
  filter_valid(pl.bb, pl.w, pl.h, kernel, tmp, mu_bb);
  filter_valid(pl.ab, pl.w, pl.h, kernel, tmp, mu_ab);

  LevelStats st;
  double sum_lcs = 0.0, sum_cs = 0.0, sum_l = 0.0;
  const std::size_t n = mu_a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double va = mu_aa[i] - ma * ma;
    const double vb = mu_bb[i] - mb * mb;
    const double cov = mu_ab[i] - ma * mb;
    const double l = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
    const double cs = (2.0 * cov + c2) / (va + vb + c2);
    sum_l += l;
    sum_cs += cs;
    sum_lcs += l * cs;
  }
  st.mean_lcs = sum_lcs / n;
  st.mean_cs = sum_cs / n;
  st.mean_l = sum_l / n;
  return st;
}

void check_pair(const GrayFrame& a, const GrayFrame& b, const SsimParams& p) {
  p.validate();
  if (!a.same_size(b)) throw DimensionMismatch("ssim: frame dimensions differ");
  if (a.width < p.window_size || a.height < p.window_size)
    throw FrameTooSmall("ssim: frame smaller than window");
}

}  // namespace

int feasible_levels(const GrayFrame& a, const GrayFrame& b, const SsimParams& p) {
  const int min_dim = std::min({a.width, a.height, b.width, b.height});
  int levels = 0;
  while (levels < static_cast<int>(p.scale_weights.size()) &&
         min_dim >= p.window_size << levels)
    ++levels;
  return levels;
}

double ssim_single(const GrayFrame& a, const GrayFrame& b, const SsimParams& p) {
  check_pair(a, b, p);
  const double L = p.dynamic_range;
  const double c1 = (p.k1 * L) * (p.k1 * L);
  const double c2 = (p.k2 * L) * (p.k2 * L);
  const auto kernel = gaussian_kernel(p.window_size, p.gaussian_sigma);
  const auto pl = Planes::from_frames(a, b);
  const auto st = level_stats(pl, kernel, c1, c2);
  return std::clamp(st.mean_lcs, -1.0, 1.0);
}

double ms_ssim(const GrayFrame& a, const GrayFrame& b, const SsimParams& p) {
  check_pair(a, b, p);
  const int levels = feasible_levels(a, b, p);
  if (levels <= 0) throw FrameTooSmall("ms_ssim: frame smaller than window");

  std::vector<double> weights(p.scale_weights.begin(), p.scale_weights.begin() + levels);
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (auto& w : weights) w /= wsum;

  const double L = p.dynamic_range;
  const double c1 = (p.k1 * L) * (p.k1 * L);
  const double c2 = (p.k2 * L) * (p.k2 * L);
  const auto kernel = gaussian_kernel(p.window_size, p.gaussian_sigma);

  Planes pl = Planes::from_frames(a, b);
  double score = 1.0;
  for (int level = 0; level < levels; ++level) {
    const auto st = level_stats(pl, kernel, c1, c2);
    if (level + 1 < levels) {
      score *= std::pow(std::max(st.mean_cs, 0.0), weights[level]);
      pl.pool2x();
    } else {
      // Coarsest scale carries the luminance term.
      score *= std::pow(std::max(st.mean_cs, 0.0), weights[level]) *
               std::pow(std::max(st.mean_l, 0.0), weights[level]);
    }
  }
  return std::clamp(score, -1.0, 1.0);
}

GrayFrame downsample2x(const GrayFrame& f) {
  if (f.width < 2 || f.height < 2) throw FrameTooSmall("downsample2x: need at least 2x2");
  GrayFrame out;
  out.width = f.width / 2;
  out.height = f.height / 2;
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) {
      const std::size_t i0 = static_cast<std::size_t>(2 * y) * f.width + 2 * x;
      const std::size_t i1 = i0 + f.width;
      const unsigned sum = f.pixels[i0] + f.pixels[i0 + 1] + f.pixels[i1] + f.pixels[i1 + 1];
      out.at(y, x) = static_cast<std::uint8_t>((sum + 2) / 4);  // round half up
    }
  return out;
}

}  // namespace moments::ssim
