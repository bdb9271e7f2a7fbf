#include "reblur/models/tensor.h"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace reblur {
namespace {

std::size_t Volume(const Tensor::Shape& s) {
  for (int d : s) {
    if (d < 0) throw std::invalid_argument("Tensor: negative dimension");
  }
  return static_cast<std::size_t>(s[0]) * s[1] * s[2] * s[3];
}

}  // namespace

Tensor::Tensor(Shape shape, double fill)
    : shape_(shape), data_(Volume(shape), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  if (data_.size() != Volume(shape_)) {
    throw std::invalid_argument("Tensor: data size does not match shape " +
                                ShapeString());
  }
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw std::logic_error("Tensor::item on tensor of shape " + ShapeString());
  }
  return data_[0];
}

void Tensor::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Tensor::ShapeString() const {
  return "(" + std::to_string(shape_[0]) + "," + std::to_string(shape_[1]) +
         "," + std::to_string(shape_[2]) + "," + std::to_string(shape_[3]) + ")";
}

Tensor StackImages(std::span<const ImageTensor* const> images) {
  if (images.empty()) throw std::invalid_argument("StackImages: no images");
  const int h = images[0]->height();
  const int w = images[0]->width();
  Tensor out({static_cast<int>(images.size()), 3, h, w});
  const std::size_t per = images[0]->size();
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i]->height() != h || images[i]->width() != w) {
      throw std::invalid_argument("StackImages: images differ in shape");
    }
    std::copy(images[i]->pixels().begin(), images[i]->pixels().end(),
              out.data() + i * per);
  }
  return out;
}

Tensor StackImages(std::span<const ImageTensor> images) {
  std::vector<const ImageTensor*> ptrs;
  ptrs.reserve(images.size());
  for (const ImageTensor& img : images) ptrs.push_back(&img);
  return StackImages(std::span<const ImageTensor* const>(ptrs));
}

Tensor ImageToTensor(const ImageTensor& image) {
  const ImageTensor* p = &image;
  return StackImages(std::span<const ImageTensor* const>(&p, 1));
}

ImageTensor TensorToImage(const Tensor& t, int n) {
  if (t.c() != 3) throw std::invalid_argument("TensorToImage: expected 3 channels");
  if (n < 0 || n >= t.n()) throw std::out_of_range("TensorToImage: bad index");
  const std::size_t per = static_cast<std::size_t>(3) * t.h() * t.w();
  std::vector<double> px(t.data() + n * per, t.data() + (n + 1) * per);
  return ImageTensor(t.h(), t.w(), std::move(px));
}

}  // namespace reblur
