#ifndef REBLUR_TTA_TTA_H_
#define REBLUR_TTA_TTA_H_

#include <span>
#include <string>
#include <vector>

#include "reblur/data/dataset.h"
#include "reblur/data/image.h"
#include "reblur/models/network.h"

namespace reblur {

struct TtaConfig {
  int steps = 5;
  double lr = 3e-6;
  int histogram_bins = 256;

  void Validate() const;
};

struct TtaResult {
  ImageTensor adapted;            // histogram_match(L^N, L^0), in [0,1]
  ImageTensor initial;            // L^0 = M_D(B), clipped to [0,1]
  std::vector<double> self_loss;  // |M_R(L^i) - L^i|, i = 0..N
};

// Test-time adaptation of one image. A private copy of the deblurring
// module takes N plain gradient steps on the self-supervised reblurring
// loss with the reblurring module frozen; neither input network changes.
TtaResult Adapt(const ImageTensor& blurry, const Network& deblur, const Network& reblur,
                const TtaConfig& config);

struct TtaSweepRow {
  int steps = 0;
  double psnr = 0.0;       // mean over images
  double ssim = 0.0;
  double self_loss = 0.0;  // mean self-loss of L^steps
};

struct TtaSweepResult {
  std::vector<TtaSweepRow> rows;                     // one per requested step count
  std::vector<std::vector<double>> self_loss;        // per image, at each requested step
};

// One adaptation per image up to max(step_list), snapshotting the
// histogram-matched output at every listed step. Metrics are taken against
// the sharp images of `dataset`.
TtaSweepResult TtaSweep(const Dataset& dataset, const Network& deblur,
                        const Network& reblur, std::span<const int> step_list,
                        const TtaConfig& config);

std::string TtaSweepCsv(const TtaSweepResult& result);

}  // namespace reblur

#endif  // REBLUR_TTA_TTA_H_
