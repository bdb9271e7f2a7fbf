#include "reblur/training/trainer.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "reblur/data/random.h"
#include "reblur/training/adam.h"

namespace reblur {
namespace {

constexpr std::uint64_t kCropStream = 0xc7090000ULL;

void RequireFinite(double v, const char* name, std::int64_t step) {
  if (!std::isfinite(v)) {
    throw std::runtime_error("non-finite " + std::string(name) + " (" +
                             std::to_string(v) + ") at step " + std::to_string(step));
  }
}

bool RunsDeblurStep(TrainMode mode) { return mode != TrainMode::kReblurOnly; }
bool RunsReblurStep(TrainMode mode) { return mode != TrainMode::kDeblurOnly; }

// Batch tensors for `indices`, optionally cropped to crop x crop at offsets
// drawn from the (seed, step) stream. Both images of a pair share the crop.
std::pair<Tensor, Tensor> MakeBatch(const Dataset& dataset,
                                    const std::vector<std::size_t>& indices,
                                    int crop, std::uint64_t seed, std::int64_t step) {
  std::vector<ImageTensor> blurry;
  std::vector<ImageTensor> sharp;
  blurry.reserve(indices.size());
  sharp.reserve(indices.size());
  std::mt19937_64 gen(StreamSeed(seed, kCropStream + static_cast<std::uint64_t>(step)));
  for (std::size_t i : indices) {
    const ImagePair& p = dataset.pairs[i];
    if (crop <= 0) {
      blurry.push_back(p.blurry);
      sharp.push_back(p.sharp);
      continue;
    }
    if (crop > p.sharp.height() || crop > p.sharp.width()) {
      throw std::invalid_argument("crop_size exceeds pair size");
    }
    const int y = static_cast<int>(UniformIndex(gen, p.sharp.height() - crop + 1));
    const int x = static_cast<int>(UniformIndex(gen, p.sharp.width() - crop + 1));
    blurry.push_back(p.blurry.Crop(y, x, crop, crop));
    sharp.push_back(p.sharp.Crop(y, x, crop, crop));
  }
  return {StackImages(blurry), StackImages(sharp)};
}

}  // namespace

void TrainConfig::Validate() const {
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) {
    throw std::invalid_argument("initial_lr must be > 0");
  }
  double prev = 0.0;
  for (double m : milestones) {
    if (!(m > prev) || !(m < 1.0)) {
      throw std::invalid_argument("milestones must be strictly increasing in (0,1)");
    }
    prev = m;
  }
  LossConfig{lambda_reblur, 1}.Validate();
  if (crop_size < 0 || crop_size % 4 != 0) {
    throw std::invalid_argument("crop_size must be 0 or a positive multiple of 4");
  }
  if (checkpoint_every < 0) throw std::invalid_argument("checkpoint_every must be >= 0");
}

TrainState InitTrainState(const DeblurConfig& deblur, const ReblurConfig& reblur,
                          std::uint64_t seed) {
  TrainState state{BuildDeblur(deblur, StreamSeed(seed, 1)),
                   BuildReblur(reblur, StreamSeed(seed, 2)), {}, {}};
  state.deblur_optimizer = InitAdam(state.deblur);
  state.reblur_optimizer = InitAdam(state.reblur);
  state.seed = seed;
  return state;
}

double LrSchedule(int epoch, int total_epochs, double initial_lr,
                  std::span<const double> milestones) {
  if (total_epochs <= 0 || epoch < 0 || epoch >= total_epochs) {
    throw std::out_of_range("LrSchedule: epoch " + std::to_string(epoch) +
                            " outside [0, " + std::to_string(total_epochs) + ")");
  }
  int passed = 0;
  for (double f : milestones) {
    // The small slack keeps e.g. 0.9 * 4000 = 3600.0000000000005 at 3600.
    const double boundary = std::ceil(f * total_epochs - 1e-9);
    if (epoch >= boundary) ++passed;
  }
  return std::ldexp(initial_lr, -passed);
}

double LrSchedule(int epoch, int total_epochs, double initial_lr) {
  static constexpr double kMilestones[] = {0.5, 0.75, 0.9};
  return LrSchedule(epoch, total_epochs, initial_lr, kMilestones);
}

LossReport JointTrainStep(TrainState& state, const Tensor& blurry, const Tensor& sharp,
                          const TrainConfig& config, double lr,
                          std::span<const ExternalLoss> external) {
  if (blurry.shape() != sharp.shape()) {
    throw std::invalid_argument("JointTrainStep: blurry " + blurry.ShapeString() +
                                " vs sharp " + sharp.ShapeString());
  }
  LossReport report;
  const Var b = Constant(blurry);
  const Var s = Constant(sharp);

  if (RunsDeblurStep(config.mode)) {
    state.deblur.ZeroGrad();
    const Var l = state.deblur.Forward(b);
    const Var l1 = L1Distance(l, s);
    Var total = l1;
    if (config.lambda_reblur != 0.0) {
      const Var sup = SupervisedReblurLoss(state.reblur, l, s);
      report.reblur_sup = sup.value().item();
      total = Add(total, Scale(sup, config.lambda_reblur));
    } else if (config.mode == TrainMode::kJoint) {
      report.reblur_sup = SupervisedReblurLoss(state.reblur, Detach(l), s).value().item();
    }
    for (const ExternalLoss& term : external) {
      total = Add(total, Scale(term.fn(l, s), term.weight));
    }
    report.l1 = l1.value().item();
    report.total_D = total.value().item();
    RequireFinite(report.total_D, "total_D", state.step);
    Backward(total);
    AdamStep(state.deblur, state.deblur_optimizer, lr);
    state.deblur.ZeroGrad();
  }

  if (RunsReblurStep(config.mode)) {
    const Var l = Constant(state.deblur.Evaluate(blurry));
    state.reblur.ZeroGrad();
    const Var reblurred = state.reblur.Forward(l);
    const Var blur = L1Distance(reblurred, b);
    report.blur = blur.value().item();
    report.reblur_self = L1Distance(Detach(reblurred), l).value().item();
    Var total = blur;
    if (config.reblur_objective == ReblurObjective::kBlurAndSharp) {
      const Var s_hat = Constant(state.deblur.Evaluate(sharp));
      const Var sharp_term = SharpnessPreservationLoss(state.reblur, s_hat);
      report.sharp = sharp_term.value().item();
      total = Add(total, sharp_term);
    }
    report.total_R = total.value().item();
    RequireFinite(report.total_R, "total_R", state.step);
    Backward(total);
    AdamStep(state.reblur, state.reblur_optimizer, lr);
    state.reblur.ZeroGrad();
  }
  return report;
}

TrainState Train(const TrainConfig& config, const Dataset& dataset, TrainState state,
                 const TrainOptions& options) {
  config.Validate();
  if (dataset.empty()) throw std::invalid_argument("Train: empty dataset");
  if (state.epoch >= config.epochs) return state;

  const BatchIterator batches(dataset.size(), config.batch_size, config.seed);
  std::ofstream csv;
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    const auto path = options.out_dir / "losses.csv";
    const bool fresh = !std::filesystem::exists(path) || state.step == 0;
    csv.open(path, fresh ? std::ios::trunc : std::ios::app);
    if (!csv) throw std::runtime_error("cannot open " + path.string());
    if (fresh) csv << LossCsvHeader() << "\n";
  }

  for (int epoch = state.epoch; epoch < config.epochs; ++epoch) {
    if (options.stop_after_epoch >= 0 && epoch >= options.stop_after_epoch) break;
    const double lr = LrSchedule(epoch, config.epochs, config.initial_lr, config.milestones);
    for (const std::vector<std::size_t>& idx : batches.Epoch(epoch)) {
      const auto [b, s] = MakeBatch(dataset, idx, config.crop_size, config.seed, state.step);
      const LossReport report =
          JointTrainStep(state, b, s, config, lr, options.external_losses);
      ++state.step;
      if (csv.is_open()) csv << LossCsvRow(state.step, epoch, report) << "\n";
      if (options.on_step) options.on_step(state.step, epoch, report);
    }
    state.epoch = epoch + 1;
    if (csv.is_open()) csv.flush();
    if (!options.out_dir.empty() && config.checkpoint_every > 0 &&
        state.epoch % config.checkpoint_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoint_epoch%06d.ckpt", state.epoch);
      SaveCheckpoint(options.out_dir / name, state);
      SaveCheckpoint(options.out_dir / "checkpoint_latest.ckpt", state);
    }
  }
  return state;
}

std::string ToString(TrainMode mode) {
  switch (mode) {
    case TrainMode::kJoint: return "joint";
    case TrainMode::kDeblurOnly: return "deblur_only";
    case TrainMode::kReblurOnly: return "reblur_only";
  }
  return "?";
}

TrainMode ParseTrainMode(const std::string& s) {
  if (s == "joint") return TrainMode::kJoint;
  if (s == "deblur_only") return TrainMode::kDeblurOnly;
  if (s == "reblur_only") return TrainMode::kReblurOnly;
  throw std::invalid_argument("unknown train mode '" + s +
                              "' (expected joint, deblur_only or reblur_only)");
}

std::string ToString(ReblurObjective objective) {
  return objective == ReblurObjective::kBlurOnly ? "blur_only" : "blur_and_sharp";
}

ReblurObjective ParseReblurObjective(const std::string& s) {
  if (s == "blur_and_sharp") return ReblurObjective::kBlurAndSharp;
  if (s == "blur_only") return ReblurObjective::kBlurOnly;
  throw std::invalid_argument("unknown reblur objective '" + s +
                              "' (expected blur_and_sharp or blur_only)");
}

}  // namespace reblur
