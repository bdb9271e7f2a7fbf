#include "reblur/metrics/kernel_estimation.h"

#include <cblas.h>
#include <lapack.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "reblur/data/png_io.h"

namespace reblur {

std::vector<double> Luma(const ImageTensor& image) {
  std::vector<double> out(image.plane_size());
  const auto r = image.plane(0);
  const auto g = image.plane(1);
  const auto b = image.plane(2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  }
  return out;
}

std::vector<double> EstimateKernelLeastSquares(const ImageTensor& deblurred,
                                               const ImageTensor& blurry,
                                               int ksize, double eps) {
  if (!deblurred.SameShape(blurry)) {
    throw std::invalid_argument("EstimateResidualKernel: shape mismatch");
  }
  if (ksize < 1 || ksize % 2 == 0) {
    throw std::invalid_argument("EstimateResidualKernel: ksize must be odd");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("EstimateResidualKernel: eps must be > 0");
  const int h = deblurred.height();
  const int w = deblurred.width();
  if (h <= ksize || w <= ksize) {
    throw std::invalid_argument("EstimateResidualKernel: image too small for ksize");
  }
  const std::vector<double> lum_l = Luma(deblurred);
  const std::vector<double> lum_b = Luma(blurry);
  const auto [lo, hi] = std::minmax_element(lum_l.begin(), lum_l.end());
  if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) {
    throw std::invalid_argument(
        "EstimateResidualKernel: deblurred image is constant, kernel undetermined");
  }

  // One equation per pixel whose whole kernel footprint lies inside the
  // image: B(y, x) = sum_{i,j} k(i, j) L(y - i + r, x - j + r).
  const int r = ksize / 2;
  const int kk = ksize * ksize;
  const int rows = (h - 2 * r) * (w - 2 * r);
  std::vector<double> a(static_cast<std::size_t>(rows) * kk);
  std::vector<double> rhs(rows);
  int row = 0;
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x, ++row) {
      double* dst = &a[static_cast<std::size_t>(row) * kk];
      for (int i = 0; i < ksize; ++i) {
        for (int j = 0; j < ksize; ++j) dst[i * ksize + j] = lum_l[(y - i + r) * w + (x - j + r)];
      }
      rhs[row] = lum_b[y * w + x];
    }
  }
  std::vector<double> normal(static_cast<std::size_t>(kk) * kk);
  std::vector<double> k(kk);
  cblas_dsyrk(CblasRowMajor, CblasUpper, CblasTrans, kk, rows, 1.0, a.data(), kk, 0.0,
              normal.data(), kk);
  cblas_dgemv(CblasRowMajor, CblasTrans, rows, kk, 1.0, a.data(), kk, rhs.data(), 1, 0.0,
              k.data(), 1);
  double trace = 0.0;
  for (int i = 0; i < kk; ++i) trace += normal[i * kk + i];
  const double reg = eps * trace / kk;
  for (int i = 0; i < kk; ++i) normal[i * kk + i] += reg;
  // Row-major upper is column-major lower.
  const char uplo = 'L';
  const lapack_int n = kk, nrhs = 1;
  lapack_int info = 0;
  LAPACK_dposv(&uplo, &n, &nrhs, normal.data(), &n, k.data(), &n, &info);
  if (info != 0) {
    throw std::runtime_error("EstimateResidualKernel: normal equations not solvable (info " +
                             std::to_string(info) + ")");
  }
  return k;
}

BlurKernel EstimateResidualKernel(const ImageTensor& deblurred,
                                  const ImageTensor& blurry, int ksize, double eps) {
  std::vector<double> k = EstimateKernelLeastSquares(deblurred, blurry, ksize, eps);
  double sum = 0.0;
  for (double& v : k) {
    v = std::max(v, 0.0);
    sum += v;
  }
  if (!(sum > 0.0)) {
    throw std::invalid_argument("EstimateResidualKernel: estimate has no positive mass");
  }
  for (double& v : k) v /= sum;
  return BlurKernel(ksize, std::move(k));
}

double KernelCorrelation(const BlurKernel& a, const BlurKernel& b) {
  if (a.size() != b.size()) throw std::invalid_argument("KernelCorrelation: size mismatch");
  const auto wa = a.weights();
  const auto wb = b.weights();
  const double n = static_cast<double>(wa.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    ma += wa[i];
    mb += wb[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    sab += (wa[i] - ma) * (wb[i] - mb);
    saa += (wa[i] - ma) * (wa[i] - ma);
    sbb += (wb[i] - mb) * (wb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return saa == sbb ? 1.0 : 0.0;
  return sab / std::sqrt(saa * sbb);
}

void WriteKernelPng(const std::filesystem::path& path, const BlurKernel& kernel,
                    int scale) {
  const int k = kernel.size();
  const int side = k * scale;
  const double peak = *std::max_element(kernel.weights().begin(), kernel.weights().end());
  std::vector<double> img(static_cast<std::size_t>(side) * side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      img[y * side + x] = peak > 0.0 ? kernel.at(y / scale, x / scale) / peak : 0.0;
    }
  }
  WriteGrayPng(path, side, side, img);
}

}  // namespace reblur
