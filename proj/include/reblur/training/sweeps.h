#ifndef REBLUR_TRAINING_SWEEPS_H_
#define REBLUR_TRAINING_SWEEPS_H_

#include <span>
#include <string>
#include <vector>

#include "reblur/data/dataset.h"
#include "reblur/models/network.h"
#include "reblur/training/trainer.h"

namespace reblur {

struct CapacityRow {
  int num_resblocks = 0;
  double deblur_psnr = 0.0;  // PSNR(L, S)
  double reblur_psnr = 0.0;  // PSNR(M_R(L), B)
};

struct CapacitySweepConfig {
  DeblurConfig deblur;  // num_resblocks is overridden per row
  ReblurConfig reblur{.channels = 64, .num_resblocks = 2, .conv_kernel = 5};
  TrainConfig deblur_training;  // mode and lambda are forced to deblur_only, 0
  TrainConfig reblur_training;  // mode and objective forced to reblur_only, blur_only
};

// For each n: train a deblurring module with n ResBlocks on the L1 loss
// alone, then a fresh reblurring module on blur reconstruction alone with
// that deblurring module fixed. Both PSNRs are means over `heldout`, with
// L and M_R(L) clipped to [0,1].
std::vector<CapacityRow> CapacitySweep(std::span<const int> resblock_counts,
                                       const Dataset& train, const Dataset& heldout,
                                       const CapacitySweepConfig& config);

std::string CapacityCsv(std::span<const CapacityRow> rows);

struct ReblurSizeRow {
  int reblur_resblocks = 0;  // 0 = L1 baseline without a reblurring loss
  double psnr = 0.0;
  double ssim = 0.0;
};

// Joint training with a reblurring module of n ResBlocks for every n in
// `reblur_counts`; n = 0 trains the deblurring module on L1 alone.
std::vector<ReblurSizeRow> ReblurSizeSweep(std::span<const int> reblur_counts,
                                           const Dataset& train, const Dataset& heldout,
                                           const DeblurConfig& deblur,
                                           const ReblurConfig& reblur,
                                           const TrainConfig& training);

std::string ReblurSizeCsv(std::span<const ReblurSizeRow> rows);

// Spearman rank correlation with average ranks for ties. Returns NaN when
// either side has zero rank variance.
double SpearmanCorrelation(std::span<const double> a, std::span<const double> b);

}  // namespace reblur

#endif  // REBLUR_TRAINING_SWEEPS_H_
