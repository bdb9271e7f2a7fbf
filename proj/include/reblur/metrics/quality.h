#ifndef REBLUR_METRICS_QUALITY_H_
#define REBLUR_METRICS_QUALITY_H_

#include "reblur/data/image.h"

namespace reblur {

// 10*log10(peak^2 / MSE) over all channels. Identical images give +inf.
double Psnr(const ImageTensor& a, const ImageTensor& b, double peak = 1.0);

struct SsimParams {
  double k1 = 0.01;
  double k2 = 0.03;
  int window = 11;
  double sigma = 1.5;
  double data_range = 1.0;
};

// SSIM of each RGB channel computed as a grayscale image, then averaged.
// The Gaussian-weighted statistics are taken over every full window inside
// the image (no padding) and the SSIM map is averaged over those positions.
// Throws std::invalid_argument if the image is smaller than the window.
double SsimPerChannel(const ImageTensor& a, const ImageTensor& b,
                      const SsimParams& params = {});

}  // namespace reblur

#endif  // REBLUR_METRICS_QUALITY_H_
