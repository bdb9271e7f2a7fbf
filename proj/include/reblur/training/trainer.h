#ifndef REBLUR_TRAINING_TRAINER_H_
#define REBLUR_TRAINING_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "reblur/data/dataset.h"
#include "reblur/losses/losses.h"
#include "reblur/models/checkpoint.h"
#include "reblur/models/network.h"

namespace reblur {

enum class TrainMode { kJoint, kDeblurOnly, kReblurOnly };

// What the reblurring module minimises: blur reconstruction plus sharpness
// preservation, or blur reconstruction alone (independent reblurring).
enum class ReblurObjective { kBlurAndSharp, kBlurOnly };

struct TrainConfig {
  int epochs = 1;
  int batch_size = 8;
  double initial_lr = 1e-4;
  std::vector<double> milestones{0.5, 0.75, 0.9};
  double lambda_reblur = 1.0;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::kJoint;
  ReblurObjective reblur_objective = ReblurObjective::kBlurAndSharp;
  int crop_size = 0;         // random square training crops; 0 = whole pairs
  int checkpoint_every = 0;  // epochs between periodic checkpoints; 0 = none

  void Validate() const;
};

// Training state and checkpoint share one representation.
using TrainState = Checkpoint;

TrainState InitTrainState(const DeblurConfig& deblur, const ReblurConfig& reblur,
                          std::uint64_t seed);

// initial_lr * 2^-m, m = number of milestones f with epoch >= ceil(f * total).
double LrSchedule(int epoch, int total_epochs, double initial_lr,
                  std::span<const double> milestones);
double LrSchedule(int epoch, int total_epochs, double initial_lr);

// One alternating step on a batch, (N,3,H,W) tensors:
//   1. L = M_D(B); minimise L1(L,S) + lambda * |M_R(L) - M_R(S)| (+ external
//      terms) over theta_D with M_R frozen.
//   2. L = M_D(B) and S^ = M_D(S) recomputed as constants; minimise the
//      reblurring objective over theta_R.
// Sub-steps not selected by config.mode are skipped. Throws
// std::runtime_error if a loss is not finite.
LossReport JointTrainStep(TrainState& state, const Tensor& blurry, const Tensor& sharp,
                          const TrainConfig& config, double lr,
                          std::span<const ExternalLoss> external = {});

struct TrainOptions {
  // When set: losses.csv (appended) and periodic checkpoints are written here.
  std::filesystem::path out_dir;
  // Stop once this many epochs are complete (simulated interruption); -1 = off.
  int stop_after_epoch = -1;
  std::vector<ExternalLoss> external_losses;
  std::function<void(std::int64_t step, int epoch, const LossReport&)> on_step;
};

// Continues `state` from state.epoch up to config.epochs. Deterministic in
// (config, dataset, state): the batch order of epoch e depends only on
// (seed, e) and crop offsets only on (seed, global step), so an interrupted
// and resumed run matches an uninterrupted one bit for bit.
TrainState Train(const TrainConfig& config, const Dataset& dataset, TrainState state,
                 const TrainOptions& options = {});

std::string ToString(TrainMode mode);
TrainMode ParseTrainMode(const std::string& s);
std::string ToString(ReblurObjective objective);
ReblurObjective ParseReblurObjective(const std::string& s);

}  // namespace reblur

#endif  // REBLUR_TRAINING_TRAINER_H_
