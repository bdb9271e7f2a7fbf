#ifndef REBLUR_METRICS_KERNEL_ESTIMATION_H_
#define REBLUR_METRICS_KERNEL_ESTIMATION_H_

#include <filesystem>
#include <vector>

#include "reblur/data/image.h"

namespace reblur {

// Luma (0.299, 0.587, 0.114) of an RGB image, row-major.
std::vector<double> Luma(const ImageTensor& image);

// Regularised least-squares kernel k minimising |k * L - B|^2 + eps' |k|^2
// on the luma planes, over the pixels whose kernel footprint lies inside the
// image. eps' = eps * mean(L^2 over footprints), which makes the result
// invariant to a common rescaling of L and B. Returns the ksize x ksize
// kernel, row-major, before any clipping. Throws std::invalid_argument if L
// is constant or not larger than the kernel.
std::vector<double> EstimateKernelLeastSquares(const ImageTensor& deblurred,
                                               const ImageTensor& blurry,
                                               int ksize, double eps);

// EstimateKernelLeastSquares with negatives clipped and the result
// renormalised to unit sum.
BlurKernel EstimateResidualKernel(const ImageTensor& deblurred,
                                  const ImageTensor& blurry, int ksize,
                                  double eps = 1e-4);

// Zero-mean normalised cross-correlation of two equally sized kernels.
double KernelCorrelation(const BlurKernel& a, const BlurKernel& b);

// Kernel scaled so its maximum is white, magnified by `scale` with
// nearest-neighbour replication, as an 8-bit grayscale PNG.
void WriteKernelPng(const std::filesystem::path& path, const BlurKernel& kernel,
                    int scale = 16);

}  // namespace reblur

#endif  // REBLUR_METRICS_KERNEL_ESTIMATION_H_
