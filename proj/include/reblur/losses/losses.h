#ifndef REBLUR_LOSSES_LOSSES_H_
#define REBLUR_LOSSES_LOSSES_H_

#include <cstdint>
#include <functional>
#include <string>

#include "reblur/models/autograd.h"
#include "reblur/models/network.h"

namespace reblur {

struct LossConfig {
  double lambda_reblur = 1.0;
  int distance_p = 1;  // only the L1 distance is supported

  void Validate() const;
};

struct LossReport {
  double l1 = 0.0;
  double blur = 0.0;
  double sharp = 0.0;
  double reblur_sup = 0.0;
  double reblur_self = 0.0;
  double total_D = 0.0;
  double total_R = 0.0;

  bool AllFiniteNonNegative() const;
  friend bool operator==(const LossReport&, const LossReport&) = default;
};

// Extra term for the deblurring objective, e.g. a perceptual or adversarial
// loss supplied by the caller. `fn(deblurred, sharp)` must return a scalar.
struct ExternalLoss {
  std::string name;
  double weight = 1.0;
  std::function<Var(const Var& deblurred, const Var& sharp)> fn;
};

// Mean absolute difference over all elements.
Var L1Distance(const Var& a, const Var& b);

// |M_R(L) - B|. Gradients reach both the reblurring parameters and L.
Var BlurReconstructionLoss(const Network& reblur, const Var& deblurred,
                           const Var& blurry);

// |M_R(S^) - S^| with S^ = M_D(S) taken as a constant input.
Var SharpnessPreservationLoss(const Network& reblur, const Var& pseudo_sharp);

// Objective of the reblurring module: blur reconstruction on a detached L
// plus sharpness preservation, equally weighted. Only M_R receives gradient.
Var ReblurModuleLoss(const Network& reblur, const Var& deblurred,
                     const Var& blurry, const Var& pseudo_sharp);

// |M_R(L) - M_R(S)| with M_R frozen; gradient flows into L only.
Var SupervisedReblurLoss(const Network& reblur, const Var& deblurred,
                         const Var& sharp);

// L1(L, S) + lambda * SupervisedReblurLoss. With lambda == 0 the reblurring
// module is not evaluated.
Var DeblurTotalLoss(const Var& deblurred, const Var& sharp, const Network& reblur,
                    const LossConfig& config);

// |M_R(L) - L*| where L* is a detached copy of L and M_R is frozen.
Var SelfSupervisedReblurLoss(const Network& reblur, const Var& deblurred);

// Loss CSV: "step,epoch,l1,blur,sharp,reblur_sup,reblur_self,total_D,total_R".
std::string LossCsvHeader();
std::string LossCsvRow(std::int64_t step, int epoch, const LossReport& report);

}  // namespace reblur

#endif  // REBLUR_LOSSES_LOSSES_H_
