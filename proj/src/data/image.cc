#include "reblur/data/image.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace reblur {

ImageTensor::ImageTensor(int height, int width, double fill)
    : height_(height), width_(width) {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("ImageTensor: non-positive dimensions");
  }
  pixels_.assign(kChannels * plane_size(), fill);
}

ImageTensor::ImageTensor(int height, int width, std::vector<double> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("ImageTensor: non-positive dimensions");
  }
  if (pixels_.size() != kChannels * plane_size()) {
    throw std::invalid_argument("ImageTensor: pixel buffer holds " +
                                std::to_string(pixels_.size()) +
                                " values, expected " +
                                std::to_string(kChannels * plane_size()));
  }
}

ImageTensor ImageTensor::Clipped() const {
  ImageTensor out = *this;
  for (double& v : out.pixels_) {
    v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
  }
  return out;
}

ImageTensor ImageTensor::Crop(int y, int x, int h, int w) const {
  if (y < 0 || x < 0 || h <= 0 || w <= 0 || y + h > height_ ||
      x + w > width_) {
    throw std::out_of_range("ImageTensor::Crop: region outside image");
  }
  ImageTensor out(h, w);
  for (int c = 0; c < kChannels; ++c) {
    for (int r = 0; r < h; ++r) {
      const double* src = &at(c, y + r, x);
      std::copy(src, src + w, &out.at(c, r, 0));
    }
  }
  return out;
}

BlurKernel::BlurKernel(int size, std::vector<double> weights)
    : size_(size), weights_(std::move(weights)) {
  if (size <= 0 || size % 2 == 0) {
    throw std::invalid_argument("BlurKernel: size must be odd and positive");
  }
  if (weights_.size() != static_cast<std::size_t>(size) * size) {
    throw std::invalid_argument("BlurKernel: weight count does not match size");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("BlurKernel: weights must be finite and >= 0");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument("BlurKernel: weights sum to " +
                                std::to_string(sum) + ", expected 1");
  }
}

BlurKernel BlurKernel::Delta(int size) {
  std::vector<double> w(static_cast<std::size_t>(size) * size, 0.0);
  w[(size / 2) * size + size / 2] = 1.0;
  return BlurKernel(size, std::move(w));
}

int ReflectIndex(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

BlurKernel MakeMotionKernel(double length, double angle, int size) {
  if (size <= 0 || size % 2 == 0) {
    throw std::invalid_argument("MakeMotionKernel: size must be odd, got " +
                                std::to_string(size));
  }
  if (!(length >= 0.0)) {
    throw std::invalid_argument("MakeMotionKernel: negative length");
  }
  if (length > size) {
    throw std::invalid_argument("MakeMotionKernel: length exceeds kernel size");
  }
  if (length == 0.0) return BlurKernel::Delta(size);

  // Midpoint sampling of the segment; each sample deposits into the cell
  // containing it, which approximates the segment length inside that cell.
  constexpr int kSamplesPerPixel = 256;
  const int samples =
      std::max(1, static_cast<int>(std::lround(length * kSamplesPerPixel)));
  const int center = size / 2;
  const double dx = std::cos(angle);
  const double dy = -std::sin(angle);
  std::vector<double> w(static_cast<std::size_t>(size) * size, 0.0);
  double total = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double t = -0.5 * length + (j + 0.5) * length / samples;
    const int col = center + static_cast<int>(std::floor(t * dx + 0.5));
    const int row = center + static_cast<int>(std::floor(t * dy + 0.5));
    if (row < 0 || row >= size || col < 0 || col >= size) continue;
    w[row * size + col] += 1.0;
    total += 1.0;
  }
  for (double& v : w) v /= total;
  return BlurKernel(size, std::move(w));
}

ImageTensor Convolve(const ImageTensor& image, const BlurKernel& kernel) {
  const int h = image.height();
  const int w = image.width();
  const int r = kernel.radius();
  const int k = kernel.size();
  ImageTensor out(h, w);
  // Column lookup tables: src index for each (x, kernel column).
  std::vector<int> col_index(static_cast<std::size_t>(w) * k);
  for (int x = 0; x < w; ++x) {
    for (int j = 0; j < k; ++j) col_index[x * k + j] = ReflectIndex(x - (j - r), w);
  }
  for (int c = 0; c < ImageTensor::kChannels; ++c) {
    for (int y = 0; y < h; ++y) {
      double* dst = &out.at(c, y, 0);
      for (int i = 0; i < k; ++i) {
        const double* src = &image.at(c, ReflectIndex(y - (i - r), h), 0);
        for (int j = 0; j < k; ++j) {
          const double kw = kernel.at(i, j);
          if (kw == 0.0) continue;
          for (int x = 0; x < w; ++x) dst[x] += kw * src[col_index[x * k + j]];
        }
      }
    }
  }
  return out;
}

ImageTensor ApplyBlur(const ImageTensor& image, const BlurKernel& kernel) {
  return Convolve(image, kernel).Clipped();
}

}  // namespace reblur
