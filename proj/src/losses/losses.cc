#include "reblur/losses/losses.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace reblur {

void LossConfig::Validate() const {
  if (!(lambda_reblur >= 0.0) || !std::isfinite(lambda_reblur)) {
    throw std::invalid_argument("lambda_reblur must be finite and >= 0");
  }
  if (distance_p != 1) {
    throw std::invalid_argument("distance_p must be 1 (L1 distance)");
  }
}

bool LossReport::AllFiniteNonNegative() const {
  for (double v : {l1, blur, sharp, reblur_sup, reblur_self, total_D, total_R}) {
    if (!std::isfinite(v) || v < 0.0) return false;
  }
  return true;
}

Var L1Distance(const Var& a, const Var& b) { return MeanAbsDiff(a, b); }

Var BlurReconstructionLoss(const Network& reblur, const Var& deblurred,
                           const Var& blurry) {
  return L1Distance(reblur.Forward(deblurred), blurry);
}

Var SharpnessPreservationLoss(const Network& reblur, const Var& pseudo_sharp) {
  const Var s_hat = Detach(pseudo_sharp);
  return L1Distance(reblur.Forward(s_hat), s_hat);
}

Var ReblurModuleLoss(const Network& reblur, const Var& deblurred,
                     const Var& blurry, const Var& pseudo_sharp) {
  return Add(BlurReconstructionLoss(reblur, Detach(deblurred), blurry),
             SharpnessPreservationLoss(reblur, pseudo_sharp));
}

Var SupervisedReblurLoss(const Network& reblur, const Var& deblurred,
                         const Var& sharp) {
  return L1Distance(reblur.Forward(deblurred, ParamMode::kFrozen),
                    reblur.Forward(Detach(sharp), ParamMode::kFrozen));
}

Var DeblurTotalLoss(const Var& deblurred, const Var& sharp, const Network& reblur,
                    const LossConfig& config) {
  config.Validate();
  Var total = L1Distance(deblurred, sharp);
  if (config.lambda_reblur == 0.0) return total;
  return Add(total, Scale(SupervisedReblurLoss(reblur, deblurred, sharp),
                          config.lambda_reblur));
}

Var SelfSupervisedReblurLoss(const Network& reblur, const Var& deblurred) {
  return L1Distance(reblur.Forward(deblurred, ParamMode::kFrozen), Detach(deblurred));
}

std::string LossCsvHeader() {
  return "step,epoch,l1,blur,sharp,reblur_sup,reblur_self,total_D,total_R";
}

std::string LossCsvRow(std::int64_t step, int epoch, const LossReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%lld,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                static_cast<long long>(step), epoch, r.l1, r.blur, r.sharp,
                r.reblur_sup, r.reblur_self, r.total_D, r.total_R);
  return buf;
}

}  // namespace reblur
