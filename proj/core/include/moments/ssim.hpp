#pragma once

#include <vector>

#include "moments/types.hpp"

namespace moments::ssim {

struct SsimParams {
  int window_size = 11;          // odd, >= 3
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
  // Canonical 5-scale MS-SSIM weights (Wang et al.).
  std::vector<double> scale_weights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

  void validate() const;
};

// Mean SSIM over all valid (unpadded) Gaussian-window positions. Result
// clamped to [-1, 1].
double ssim_single(const GrayFrame& a, const GrayFrame& b, const SsimParams& p = {});

// Multi-scale SSIM: contrast*structure at every scale, luminance at the
// coarsest, combined as a weighted geometric mean. If the frames cannot
// support all requested scales the level count is reduced and the weights
// renormalized.
double ms_ssim(const GrayFrame& a, const GrayFrame& b, const SsimParams& p = {});

// 2x2 mean pooling with decimation; odd tail rows/columns are dropped.
// Pixel means round half up.
GrayFrame downsample2x(const GrayFrame& f);

// Number of pyramid levels the frame pair can support with this window,
// capped by the weight count.
int feasible_levels(const GrayFrame& a, const GrayFrame& b, const SsimParams& p);

}  // namespace moments::ssim
