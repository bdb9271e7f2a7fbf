#include "reblur/tta/histogram.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace reblur {
namespace {

// Integral of the reference quantile function Q over [0, u], where Q is the
// step function through the sorted values.
class QuantileIntegral {
 public:
  explicit QuantileIntegral(std::vector<double> sorted)
      : sorted_(std::move(sorted)), prefix_(sorted_.size() + 1, 0.0) {
    for (std::size_t i = 0; i < sorted_.size(); ++i) prefix_[i + 1] = prefix_[i] + sorted_[i];
  }

  double operator()(double u) const {
    const double m = static_cast<double>(sorted_.size());
    const double pos = std::clamp(u, 0.0, 1.0) * m;
    const std::size_t k = std::min(static_cast<std::size_t>(pos), sorted_.size() - 1);
    return (prefix_[k] + (pos - static_cast<double>(k)) * sorted_[k]) / m;
  }

 private:
  std::vector<double> sorted_;
  std::vector<double> prefix_;
};

}  // namespace

ImageTensor HistogramMatch(const ImageTensor& source, const ImageTensor& reference,
                           int bins) {
  if (bins < 1) throw std::invalid_argument("HistogramMatch: bins must be >= 1");
  if (reference.plane_size() == 0) throw std::invalid_argument("HistogramMatch: empty reference");
  ImageTensor out(source.height(), source.width());
  const std::size_t n = source.plane_size();
  if (n == 0) return out;
  for (int c = 0; c < ImageTensor::kChannels; ++c) {
    const auto src = source.plane(c);
    const auto ref = reference.plane(c);
    std::vector<double> sorted(ref.begin(), ref.end());
    std::sort(sorted.begin(), sorted.end());
    const QuantileIntegral q(std::move(sorted));

    std::vector<int> bin_of(n);
    std::vector<std::size_t> counts(bins, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::clamp(src[i], 0.0, 1.0);
      bin_of[i] = std::min(static_cast<int>(v * bins), bins - 1);
      ++counts[bin_of[i]];
    }
    std::vector<double> level(bins, 0.0);
    std::size_t below = 0;
    for (int b = 0; b < bins; ++b) {
      if (counts[b] == 0) continue;
      const double lo = static_cast<double>(below) / n;
      below += counts[b];
      const double hi = static_cast<double>(below) / n;
      level[b] = (q(hi) - q(lo)) / (hi - lo);
    }
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < n; ++i) dst[i] = std::clamp(level[bin_of[i]], 0.0, 1.0);
  }
  return out;
}

}  // namespace reblur
