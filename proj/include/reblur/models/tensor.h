#ifndef REBLUR_MODELS_TENSOR_H_
#define REBLUR_MODELS_TENSOR_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "reblur/data/image.h"

namespace reblur {

// Dense NCHW array of doubles. Scalars are 1x1x1x1; convolution weights
// are laid out as (out, in, kh, kw).
class Tensor {
 public:
  using Shape = std::array<int, 4>;

  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Scalar(double v) { return Tensor({1, 1, 1, 1}, v); }

  const Shape& shape() const { return shape_; }
  int n() const { return shape_[0]; }
  int c() const { return shape_[1]; }
  int h() const { return shape_[2]; }
  int w() const { return shape_[3]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(int n, int c, int y, int x) { return data_[Offset(n, c, y, x)]; }
  double at(int n, int c, int y, int x) const { return data_[Offset(n, c, y, x)]; }

  double item() const;  // value of a one-element tensor

  void Fill(double v);
  std::string ShapeString() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t Offset(int n, int c, int y, int x) const {
    return ((static_cast<std::size_t>(n) * shape_[1] + c) * shape_[2] + y) *
               shape_[3] + x;
  }

  Shape shape_{0, 0, 0, 0};
  std::vector<double> data_;
};

// Stacks equally sized images into an (N,3,H,W) batch.
Tensor StackImages(std::span<const ImageTensor> images);
Tensor StackImages(std::span<const ImageTensor* const> images);
Tensor ImageToTensor(const ImageTensor& image);

// Extracts sample n of a (N,3,H,W) tensor.
ImageTensor TensorToImage(const Tensor& t, int n = 0);

}  // namespace reblur

#endif  // REBLUR_MODELS_TENSOR_H_
