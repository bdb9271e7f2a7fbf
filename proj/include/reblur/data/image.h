#ifndef REBLUR_DATA_IMAGE_H_
#define REBLUR_DATA_IMAGE_H_

#include <cstddef>
#include <span>
#include <vector>

namespace reblur {

// Planar RGB image, channels x height x width, stored row-major per channel.
// Values are nominally in [0,1]; network outputs may leave that range until
// they are clipped for display or storage.
class ImageTensor {
 public:
  static constexpr int kChannels = 3;

  ImageTensor() = default;
  ImageTensor(int height, int width, double fill = 0.0);
  ImageTensor(int height, int width, std::vector<double> pixels);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return kChannels; }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(height_) * width_;
  }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  double& at(int c, int y, int x) {
    return pixels_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x];
  }
  const double& at(int c, int y, int x) const {
    return pixels_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<double> plane(int c) {
    return {pixels_.data() + c * plane_size(), plane_size()};
  }
  std::span<const double> plane(int c) const {
    return {pixels_.data() + c * plane_size(), plane_size()};
  }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  bool SameShape(const ImageTensor& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  // Copy clamped to [0,1]; non-finite values map to 0.
  ImageTensor Clipped() const;

  // Sub-image [y, y+h) x [x, x+w).
  ImageTensor Crop(int y, int x, int h, int w) const;

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> pixels_;
};

// Odd-sized square kernel, nonnegative, unit sum.
class BlurKernel {
 public:
  BlurKernel() = default;
  // Validates the invariants; throws std::invalid_argument on violation.
  BlurKernel(int size, std::vector<double> weights);

  static BlurKernel Delta(int size);

  int size() const { return size_; }
  int radius() const { return size_ / 2; }
  double at(int y, int x) const { return weights_[y * size_ + x]; }
  std::span<const double> weights() const { return weights_; }

  friend bool operator==(const BlurKernel&, const BlurKernel&) = default;

 private:
  int size_ = 0;
  std::vector<double> weights_;
};

// Mirror index without edge duplication (dcb|abcd|cba), valid for any
// offset. n must be positive.
int ReflectIndex(int i, int n);

// Linear motion kernel: the segment of the given length (pixels) and angle
// (radians, counter-clockwise from +x) centred in a size x size grid,
// rasterised by the length of segment falling inside each pixel cell.
BlurKernel MakeMotionKernel(double length, double angle, int size);

// Per-channel 2-D convolution with reflect padding. Unclipped.
ImageTensor Convolve(const ImageTensor& image, const BlurKernel& kernel);

// Convolve followed by clipping to [0,1].
ImageTensor ApplyBlur(const ImageTensor& image, const BlurKernel& kernel);

}  // namespace reblur

#endif  // REBLUR_DATA_IMAGE_H_
