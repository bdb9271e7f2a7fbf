#include "reblur/metrics/quality.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace reblur {
namespace {

std::vector<double> GaussianTaps(int size, double sigma) {
  std::vector<double> taps(size);
  const int r = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    taps[i] = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable "valid" filtering of an h x w plane.
std::vector<double> FilterValid(const std::vector<double>& plane, int h, int w,
                                const std::vector<double>& taps) {
  const int k = static_cast<int>(taps.size());
  const int vh = h - k + 1;
  const int vw = w - k + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * vw, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < vw; ++x) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j) acc += taps[j] * plane[y * w + x + j];
      tmp[y * vw + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(vh) * vw, 0.0);
  for (int y = 0; y < vh; ++y) {
    for (int x = 0; x < vw; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += taps[i] * tmp[(y + i) * vw + x];
      out[y * vw + x] = acc;
    }
  }
  return out;
}

}  // namespace

double Psnr(const ImageTensor& a, const ImageTensor& b, double peak) {
  if (!a.SameShape(b)) throw std::invalid_argument("Psnr: shape mismatch");
  double se = 0.0;
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(pa.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double SsimPerChannel(const ImageTensor& a, const ImageTensor& b,
                      const SsimParams& params) {
  if (!a.SameShape(b)) throw std::invalid_argument("SsimPerChannel: shape mismatch");
  const int h = a.height();
  const int w = a.width();
  if (h < params.window || w < params.window) {
    throw std::invalid_argument("SsimPerChannel: image smaller than the " +
                                std::to_string(params.window) + "x" +
                                std::to_string(params.window) + " window");
  }
  const std::vector<double> taps = GaussianTaps(params.window, params.sigma);
  const double c1 = std::pow(params.k1 * params.data_range, 2);
  const double c2 = std::pow(params.k2 * params.data_range, 2);
  const std::size_t n = a.plane_size();

  double total = 0.0;
  for (int c = 0; c < ImageTensor::kChannels; ++c) {
    const auto x = a.plane(c);
    const auto y = b.plane(c);
    std::vector<double> px(x.begin(), x.end()), py(y.begin(), y.end());
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      xx[i] = px[i] * px[i];
      yy[i] = py[i] * py[i];
      xy[i] = px[i] * py[i];
    }
    const auto mx = FilterValid(px, h, w, taps);
    const auto my = FilterValid(py, h, w, taps);
    const auto exx = FilterValid(xx, h, w, taps);
    const auto eyy = FilterValid(yy, h, w, taps);
    const auto exy = FilterValid(xy, h, w, taps);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = exx[i] - mx[i] * mx[i];
      const double vy = eyy[i] - my[i] * my[i];
      const double cxy = exy[i] - mx[i] * my[i];
      acc += ((2 * mx[i] * my[i] + c1) * (2 * cxy + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += acc / static_cast<double>(mx.size());
  }
  return total / ImageTensor::kChannels;
}

}  // namespace reblur
