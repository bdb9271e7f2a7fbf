#include "reblur/tta/tta.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "reblur/losses/losses.h"
#include "reblur/metrics/quality.h"
#include "reblur/models/autograd.h"
#include "reblur/models/tensor.h"
#include "reblur/training/adam.h"
#include "reblur/tta/histogram.h"

namespace reblur {
namespace {

struct Trajectory {
  ImageTensor initial;
  std::vector<double> self_loss;
  std::map<int, ImageTensor> snapshots;  // step -> histogram-matched output
};

Trajectory Run(const ImageTensor& blurry, const Network& deblur, const Network& reblur,
               const TtaConfig& config, std::span<const int> snapshot_steps) {
  config.Validate();
  const int last = snapshot_steps.empty()
                       ? 0
                       : *std::max_element(snapshot_steps.begin(), snapshot_steps.end());
  const auto wanted = [&](int step) {
    return std::find(snapshot_steps.begin(), snapshot_steps.end(), step) !=
           snapshot_steps.end();
  };
  Network model = deblur;
  const Var b = Constant(ImageToTensor(blurry));

  Trajectory t;
  for (int i = 0;; ++i) {
    model.ZeroGrad();
    const Var l = i == last ? Constant(model.Evaluate(b.value())) : model.Forward(b);
    if (i == 0) t.initial = TensorToImage(l.value()).Clipped();
    if (wanted(i)) {
      ImageTensor current = TensorToImage(l.value());
      // An unchanged image needs no colour correction.
      t.snapshots[i] = i == 0 || current.Clipped() == t.initial
                           ? t.initial
                           : HistogramMatch(current, t.initial, config.histogram_bins);
    }
    const Var loss = SelfSupervisedReblurLoss(reblur, l);
    t.self_loss.push_back(loss.value().item());
    if (!std::isfinite(t.self_loss.back())) {
      throw std::runtime_error("TTA: non-finite self-supervised loss at step " +
                               std::to_string(i));
    }
    if (i == last) break;
    Backward(loss);
    GradientDescentStep(model, config.lr);
  }
  return t;
}

}  // namespace

void TtaConfig::Validate() const {
  if (steps < 0) throw std::invalid_argument("tta steps must be >= 0");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("tta lr must be > 0");
  if (histogram_bins < 1) throw std::invalid_argument("histogram_bins must be >= 1");
}

TtaResult Adapt(const ImageTensor& blurry, const Network& deblur, const Network& reblur,
                const TtaConfig& config) {
  const int steps[] = {config.steps};
  Trajectory t = Run(blurry, deblur, reblur, config, steps);
  return {std::move(t.snapshots.at(config.steps)), std::move(t.initial),
          std::move(t.self_loss)};
}

TtaSweepResult TtaSweep(const Dataset& dataset, const Network& deblur,
                        const Network& reblur, std::span<const int> step_list,
                        const TtaConfig& config) {
  if (dataset.empty()) throw std::invalid_argument("TtaSweep: empty dataset");
  if (step_list.empty()) throw std::invalid_argument("TtaSweep: empty step list");
  for (int s : step_list) {
    if (s < 0) throw std::invalid_argument("TtaSweep: negative step count");
  }
  TtaSweepResult result;
  result.rows.resize(step_list.size());
  for (std::size_t k = 0; k < step_list.size(); ++k) result.rows[k].steps = step_list[k];
  for (const ImagePair& pair : dataset.pairs) {
    const Trajectory t = Run(pair.blurry, deblur, reblur, config, step_list);
    std::vector<double> losses;
    for (std::size_t k = 0; k < step_list.size(); ++k) {
      const ImageTensor& out = t.snapshots.at(step_list[k]);
      result.rows[k].psnr += Psnr(out, pair.sharp);
      result.rows[k].ssim += SsimPerChannel(out, pair.sharp);
      result.rows[k].self_loss += t.self_loss[step_list[k]];
      losses.push_back(t.self_loss[step_list[k]]);
    }
    result.self_loss.push_back(std::move(losses));
  }
  const double n = static_cast<double>(dataset.size());
  for (TtaSweepRow& r : result.rows) {
    r.psnr /= n;
    r.ssim /= n;
    r.self_loss /= n;
  }
  return result;
}

std::string TtaSweepCsv(const TtaSweepResult& result) {
  std::string csv = "steps,psnr,ssim,self_loss\n";
  char buf[128];
  for (const TtaSweepRow& r : result.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", r.steps, r.psnr, r.ssim,
                  r.self_loss);
    csv += buf;
  }
  return csv;
}

}  // namespace reblur
