#include "reblur/training/sweeps.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "reblur/metrics/evaluate.h"
#include "reblur/metrics/quality.h"

namespace reblur {
namespace {

std::vector<double> Ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<CapacityRow> CapacitySweep(std::span<const int> resblock_counts,
                                       const Dataset& train, const Dataset& heldout,
                                       const CapacitySweepConfig& config) {
  if (heldout.empty()) throw std::invalid_argument("CapacitySweep: empty held-out set");
  TrainConfig deblur_cfg = config.deblur_training;
  deblur_cfg.mode = TrainMode::kDeblurOnly;
  deblur_cfg.lambda_reblur = 0.0;
  TrainConfig reblur_cfg = config.reblur_training;
  reblur_cfg.mode = TrainMode::kReblurOnly;
  reblur_cfg.reblur_objective = ReblurObjective::kBlurOnly;

  std::vector<CapacityRow> rows;
  for (int n : resblock_counts) {
    DeblurConfig dcfg = config.deblur;
    dcfg.num_resblocks = n;
    TrainState state = InitTrainState(dcfg, config.reblur, deblur_cfg.seed);
    state = Train(deblur_cfg, train, std::move(state));
    // The reblurring stage is a separate run over the same state.
    state.epoch = 0;
    state.step = 0;
    state = Train(reblur_cfg, train, std::move(state));

    CapacityRow row;
    row.num_resblocks = n;
    const std::vector<ImageTensor> deblurred = DeblurAll(state.deblur, heldout);
    for (std::size_t i = 0; i < heldout.size(); ++i) {
      const ImagePair& p = heldout.pairs[i];
      row.deblur_psnr += Psnr(deblurred[i], p.sharp);
      row.reblur_psnr += Psnr(state.reblur.Evaluate(deblurred[i]).Clipped(), p.blurry);
    }
    row.deblur_psnr /= static_cast<double>(heldout.size());
    row.reblur_psnr /= static_cast<double>(heldout.size());
    rows.push_back(row);
  }
  return rows;
}

std::string CapacityCsv(std::span<const CapacityRow> rows) {
  std::string csv = "num_resblocks,deblur_psnr,reblur_psnr\n";
  for (const CapacityRow& r : rows) {
    csv += std::to_string(r.num_resblocks) + "," + Fmt(r.deblur_psnr) + "," +
           Fmt(r.reblur_psnr) + "\n";
  }
  return csv;
}

std::vector<ReblurSizeRow> ReblurSizeSweep(std::span<const int> reblur_counts,
                                           const Dataset& train, const Dataset& heldout,
                                           const DeblurConfig& deblur,
                                           const ReblurConfig& reblur,
                                           const TrainConfig& training) {
  std::vector<ReblurSizeRow> rows;
  for (int n : reblur_counts) {
    if (n < 0) throw std::invalid_argument("ReblurSizeSweep: negative ResBlock count");
    ReblurConfig rcfg = reblur;
    rcfg.num_resblocks = std::max(n, 1);
    TrainConfig tcfg = training;
    if (n == 0) {
      tcfg.mode = TrainMode::kDeblurOnly;
      tcfg.lambda_reblur = 0.0;
    } else {
      tcfg.mode = TrainMode::kJoint;
    }
    TrainState state = Train(tcfg, train, InitTrainState(deblur, rcfg, tcfg.seed));
    const MetricsRow agg = Evaluate(state.deblur, heldout).Aggregate();
    rows.push_back({n, agg.psnr_db, agg.ssim});
  }
  return rows;
}

std::string ReblurSizeCsv(std::span<const ReblurSizeRow> rows) {
  std::string csv = "reblur_resblocks,psnr,ssim\n";
  for (const ReblurSizeRow& r : rows) {
    csv += std::to_string(r.reblur_resblocks) + "," + Fmt(r.psnr) + "," + Fmt(r.ssim) + "\n";
  }
  return csv;
}

double SpearmanCorrelation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("SpearmanCorrelation: need two equal-length samples");
  }
  const std::vector<double> ra = Ranks(a);
  const std::vector<double> rb = Ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

}  // namespace reblur
