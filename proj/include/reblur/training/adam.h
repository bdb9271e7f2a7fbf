#ifndef REBLUR_TRAINING_ADAM_H_
#define REBLUR_TRAINING_ADAM_H_

#include "reblur/models/checkpoint.h"
#include "reblur/models/network.h"

namespace reblur {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Zero moments shaped like the network's parameters.
AdamState InitAdam(const Network& net);

// One bias-corrected Adam update from the gradients currently accumulated
// on the network's parameters. Parameters without a gradient are treated as
// having a zero gradient.
void AdamStep(Network& net, AdamState& state, double lr, const AdamParams& params = {});

// theta -= lr * grad, for every parameter.
void GradientDescentStep(Network& net, double lr);

}  // namespace reblur

#endif  // REBLUR_TRAINING_ADAM_H_
