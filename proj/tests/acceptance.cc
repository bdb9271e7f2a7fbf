// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "reblur/cli/commands.h"
#include "reblur/data/dataset.h"
#include "reblur/losses/losses.h"
#include "reblur/metrics/evaluate.h"
#include "reblur/metrics/kernel_estimation.h"
#include "reblur/metrics/quality.h"
#include "reblur/training/adam.h"
#include "reblur/training/sweeps.h"
#include "reblur/training/trainer.h"
#include "reblur/tta/tta.h"
#include "test_util.h"

namespace reblur {
namespace {

namespace fs = std::filesystem;
using testing::CheckGradient;
using testing::GradCheck;
using testing::RandomImage;
using testing::RandomTensor;
using testing::ReadFileBytes;
using testing::TempDir;

// Desk-scale settings for the training criteria.
constexpr int kPairs = 200;
constexpr int kHoldout = 20;
constexpr std::uint64_t kSeed = 7;

DeblurConfig JointDeblur() {
  DeblurConfig c;
  c.base_channels = 16;
  c.mid_channels = {32, 48};
  c.num_resblocks = 2;
  return c;
}

ReblurConfig JointReblur() {
  ReblurConfig c;
  c.channels = 8;
  c.num_resblocks = 2;
  return c;
}

TrainConfig JointTraining() {
  TrainConfig c;
  c.epochs = 134;  // 180 pairs / batch 12 = 15 steps per epoch, 2010 steps
  c.batch_size = 12;
  c.crop_size = 32;
  c.initial_lr = 6e-4;
  c.seed = kSeed;
  return c;
}

CapacitySweepConfig CapacitySettings() {
  CapacitySweepConfig c;
  c.deblur.base_channels = 8;
  c.deblur.mid_channels = {16, 24};
  c.reblur.channels = 4;
  c.reblur.num_resblocks = 2;
  TrainConfig t;
  t.batch_size = 8;  // 23 steps per epoch
  t.crop_size = 32;
  t.initial_lr = 6e-4;
  t.seed = kSeed;
  c.deblur_training = t;
  c.deblur_training.epochs = 250;
  c.reblur_training = t;
  c.reblur_training.epochs = 30;
  return c;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// Synthetic pairs for the training criteria, blurred with motion kernels of
// length in [min_length, max_length].
class DeskData {
 public:
  DeskData(double min_length, double max_length)
      : min_length_(min_length), max_length_(max_length) {}

  const Dataset& all() {
    if (!data_) {
      WriteProceduralSources(dir_ / "sources", 40, 256, StreamSeed(kSeed, 0x5c0e));
      DatasetConfig c;
      c.source_dir = dir_ / "sources";
      c.count = kPairs;
      c.patch_size = 64;
      c.kernel_length_min = min_length_;
      c.kernel_length_max = max_length_;
      c.seed = kSeed;
      data_ = SynthesizeDataset(c);
    }
    return *data_;
  }
  Dataset train() { return SplitHoldout(all(), kHoldout).first; }
  Dataset heldout() { return SplitHoldout(all(), kHoldout).second; }

 private:
  double min_length_;
  double max_length_;
  TempDir dir_;
  std::optional<Dataset> data_;
};

Tensor Sub(const Tensor& a, const Tensor& b) {
  Tensor r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

bool AllZero(const Tensor& t) {
  return std::all_of(t.values().begin(), t.values().end(), [](double v) { return v == 0.0; });
}

bool NoGradient(const Network& net) {
  for (const NamedParameter& p : net.parameters()) {
    if (!AllZero(p.var.grad())) return false;
  }
  return true;
}

// --- 1 ----------------------------------------------------------------------

Outcome GradientCorrectness() {
  const auto start = Clock::now();
  Network deblur = BuildDeblur(testing::TinyDeblur(1), 1);
  Network reblur = BuildReblur(testing::TinyReblur(1), 2);
  testing::Randomize(deblur, 21, 0.3);
  testing::Randomize(reblur, 22, 0.3);
  const Tensor::Shape shape{1, 3, 8, 8};
  const Tensor b = RandomTensor(11, shape), s = RandomTensor(12, shape);

  std::size_t checked = 0, skipped = 0, failed = 0;
  double worst = 0.0;
  const auto tally = [&](const GradCheck& r) {
    checked += r.checked;
    skipped += r.skipped;
    failed += r.failed;
    worst = std::max(worst, r.worst_rel);
  };
  const auto check_net = [&](Network& net, const std::function<std::vector<Tensor>()>& res,
                             const std::vector<double>& w) {
    for (NamedParameter& p : net.parameters()) {
      const Tensor analytic = p.var.grad();
      tally(CheckGradient(p.var.mutable_value(), analytic, res, w));
    }
  };
  const auto check_input = [&](Var& x, const std::function<std::vector<Tensor>()>& res,
                               const std::vector<double>& w) {
    const Tensor analytic = x.grad();
    tally(CheckGradient(x.mutable_value(), analytic, res, w));
  };

  // 1: blur reconstruction, theta_R and L.
  {
    Var l = Parameter(deblur.Evaluate(b));
    reblur.ZeroGrad();
    Backward(BlurReconstructionLoss(reblur, l, Constant(b)));
    const auto res = [&] { return std::vector<Tensor>{Sub(reblur.Evaluate(l.value()), b)}; };
    check_net(reblur, res, {1.0});
    check_input(l, res, {1.0});
  }
  // 2: sharpness preservation, theta_R.
  {
    const Tensor s_hat = deblur.Evaluate(s);
    reblur.ZeroGrad();
    Backward(SharpnessPreservationLoss(reblur, Constant(s_hat)));
    check_net(reblur, [&] { return std::vector<Tensor>{Sub(reblur.Evaluate(s_hat), s_hat)}; },
              {1.0});
  }
  // 3: reblurring module objective, theta_R.
  {
    const Tensor l = deblur.Evaluate(b), s_hat = deblur.Evaluate(s);
    reblur.ZeroGrad();
    Backward(ReblurModuleLoss(reblur, Constant(l), Constant(b), Constant(s_hat)));
    check_net(reblur,
              [&] {
                return std::vector<Tensor>{Sub(reblur.Evaluate(l), b),
                                           Sub(reblur.Evaluate(s_hat), s_hat)};
              },
              {1.0, 1.0});
  }
  reblur.ZeroGrad();
  // 4: supervised reblurring, theta_D through L = M_D(B).
  {
    deblur.ZeroGrad();
    Backward(SupervisedReblurLoss(reblur, deblur.Forward(Constant(b)), Constant(s)));
    check_net(deblur,
              [&] {
                return std::vector<Tensor>{
                    Sub(reblur.Evaluate(deblur.Evaluate(b)), reblur.Evaluate(s))};
              },
              {1.0});
  }
  // 5: deblurring total, theta_D.
  for (double lambda : {1.0, 0.5}) {
    deblur.ZeroGrad();
    Backward(DeblurTotalLoss(deblur.Forward(Constant(b)), Constant(s), reblur,
                             LossConfig{lambda, 1}));
    check_net(deblur,
              [&] {
                const Tensor l = deblur.Evaluate(b);
                return std::vector<Tensor>{Sub(l, s),
                                           Sub(reblur.Evaluate(l), reblur.Evaluate(s))};
              },
              {1.0, lambda});
  }
  // 6: self-supervised, theta_D and L, with L* fixed at the expansion point.
  {
    deblur.ZeroGrad();
    Backward(SelfSupervisedReblurLoss(reblur, deblur.Forward(Constant(b))));
    const Tensor l_star = deblur.Evaluate(b);
    check_net(deblur,
              [&] {
                return std::vector<Tensor>{Sub(reblur.Evaluate(deblur.Evaluate(b)), l_star)};
              },
              {1.0});
    Var l = Parameter(l_star);
    Backward(SelfSupervisedReblurLoss(reblur, l));
    check_input(l, [&] { return std::vector<Tensor>{Sub(reblur.Evaluate(l.value()), l_star)}; },
                {1.0});
  }
  const double secs = Seconds(start);
  const bool ok = failed == 0 && checked > 0 && skipped * 20 <= checked + skipped && secs < 60;
  return {ok, Format("%zu coordinates checked, %zu kink skips, %zu failed, worst rel %.2e, "
                     "%.1fs",
                     checked, skipped, failed, worst, secs)};
}

// --- 2 ----------------------------------------------------------------------

Outcome DetachmentContracts() {
  const auto start = Clock::now();
  const Tensor::Shape shape{2, 3, 8, 8};
  const Tensor b = RandomTensor(1, shape), s = RandomTensor(2, shape);
  Network deblur = BuildDeblur(testing::TinyDeblur(1), 3);
  Network reblur = BuildReblur(testing::TinyReblur(1), 4);
  testing::Randomize(deblur, 5, 0.3);
  testing::Randomize(reblur, 6, 0.3);
  std::vector<std::string> broken;

  // M_R is frozen in the supervised and total deblurring losses.
  deblur.ZeroGrad();
  reblur.ZeroGrad();
  Backward(SupervisedReblurLoss(reblur, deblur.Forward(Constant(b)), Constant(s)));
  if (!NoGradient(reblur)) broken.push_back("eq4 reaches M_R");
  if (NoGradient(deblur)) broken.push_back("eq4 misses M_D");
  deblur.ZeroGrad();
  Backward(DeblurTotalLoss(deblur.Forward(Constant(b)), Constant(s), reblur, {}));
  if (!NoGradient(reblur)) broken.push_back("eq5 reaches M_R");

  // No gradient reaches theta_D through S^ (or L) in the reblurring losses.
  deblur.ZeroGrad();
  Backward(SharpnessPreservationLoss(reblur, deblur.Forward(Constant(s))));
  if (!NoGradient(deblur)) broken.push_back("eq2 reaches M_D");
  if (NoGradient(reblur)) broken.push_back("eq2 misses M_R");
  reblur.ZeroGrad();
  Backward(ReblurModuleLoss(reblur, deblur.Forward(Constant(b)), Constant(b),
                            deblur.Forward(Constant(s))));
  if (!NoGradient(deblur)) broken.push_back("eq3 reaches M_D");
  reblur.ZeroGrad();

  // The L* branch of the self-supervised loss carries nothing: the gradient
  // equals that of |M_R(L) - c| for a constant c = L.
  {
    Var l = Parameter(deblur.Evaluate(b));
    Backward(SelfSupervisedReblurLoss(reblur, l));
    Var l2 = Parameter(l.value());
    Backward(L1Distance(reblur.Forward(l2, ParamMode::kFrozen), Constant(l2.value())));
    if (l.grad() != l2.grad()) broken.push_back("eq6 L* branch");
    if (!NoGradient(reblur)) broken.push_back("eq6 reaches M_R");
  }

  // Alternation isolation by parameter digests.
  const TrainState init = InitTrainState(testing::TinyDeblur(1), testing::TinyReblur(1), 9);
  TrainConfig c;
  c.lambda_reblur = 1.0;
  const double lr = 1e-3;
  const auto step = [&](TrainState st, TrainMode mode) {
    c.mode = mode;
    JointTrainStep(st, b, s, c, lr);
    return st;
  };
  TrainState warm = init;  // move M_R off the identity so the D-step sees it
  warm = step(warm, TrainMode::kReblurOnly);
  warm.reblur_optimizer = InitAdam(warm.reblur);
  warm.deblur_optimizer = InitAdam(warm.deblur);
  const TrainState d_only = step(warm, TrainMode::kDeblurOnly);
  const TrainState r_only = step(warm, TrainMode::kReblurOnly);
  const TrainState joint = step(warm, TrainMode::kJoint);
  const TrainState d_then_r = step(d_only, TrainMode::kReblurOnly);
  if (d_only.reblur.ParameterDigest() != warm.reblur.ParameterDigest()) {
    broken.push_back("D-step changed M_R");
  }
  if (d_only.deblur.ParameterDigest() == warm.deblur.ParameterDigest()) {
    broken.push_back("D-step left M_D unchanged");
  }
  if (r_only.deblur.ParameterDigest() != warm.deblur.ParameterDigest()) {
    broken.push_back("R-step changed M_D");
  }
  if (joint.deblur.ParameterDigest() != d_only.deblur.ParameterDigest() ||
      joint.reblur.ParameterDigest() != d_then_r.reblur.ParameterDigest()) {
    broken.push_back("joint step is not D-step then R-step");
  }
  const double secs = Seconds(start);
  std::string detail;
  for (const std::string& m : broken) detail += (detail.empty() ? "" : "; ") + m;
  return {broken.empty() && secs < 60,
          (broken.empty() ? std::string("all zero, digests isolated") : detail) +
              Format(", %.1fs", secs)};
}

// --- 3 ----------------------------------------------------------------------

Outcome CapacityTrend(DeskData& data) {
  const auto start = Clock::now();
  const int counts[] = {1, 2, 4};
  const std::vector<CapacityRow> rows =
      CapacitySweep(counts, data.train(), data.heldout(), CapacitySettings());
  std::vector<double> dp, rp;
  std::string detail;
  for (const CapacityRow& r : rows) {
    dp.push_back(r.deblur_psnr);
    rp.push_back(r.reblur_psnr);
    detail += Format("n=%d deblur %.3f reblur %.3f; ", r.num_resblocks, r.deblur_psnr,
                     r.reblur_psnr);
  }
  const bool monotone = std::is_sorted(dp.begin(), dp.end());
  const double rho = SpearmanCorrelation(dp, rp);
  const double secs = Seconds(start);
  return {monotone && rho <= -0.5 && secs <= 900,
          detail + Format("spearman %.2f, %.0fs", rho, secs)};
}

// --- 4 and 5 ----------------------------------------------------------------

struct JointRun {
  std::optional<TrainState> state;
  std::string error;
};

Outcome JointEfficacy(DeskData& data, JointRun& run) {
  const auto start = Clock::now();
  const Dataset train = data.train();
  const Dataset held = data.heldout();
  try {
    run.state = Train(JointTraining(), train, InitTrainState(JointDeblur(), JointReblur(), kSeed));
  } catch (const std::exception& e) {
    run.error = e.what();
    return {false, std::string("training failed: ") + e.what()};
  }
  const TrainState& st = *run.state;
  const double psnr = Evaluate(st.deblur, held).Aggregate().psnr_db;
  const double base = EvaluateBlurryBaseline(held).Aggregate().psnr_db;
  double ratio = 0.0;
  for (const ImagePair& p : held.pairs) {
    const ImageTensor l = st.deblur.Evaluate(p.blurry);
    const ImageTensor s_hat = st.deblur.Evaluate(p.sharp);
    const double sharp_term =
        L1Distance(Constant(ImageToTensor(st.reblur.Evaluate(s_hat))), Constant(ImageToTensor(s_hat)))
            .value()
            .item();
    const double blur_term =
        L1Distance(Constant(ImageToTensor(st.reblur.Evaluate(l))), Constant(ImageToTensor(l)))
            .value()
            .item();
    ratio += sharp_term / blur_term;
  }
  ratio /= static_cast<double>(held.size());
  const double secs = Seconds(start);
  return {psnr >= base + 1.0 && ratio < 0.5 && secs <= 1200,
          Format("%lld steps, held-out psnr %.3f vs blurry %.3f (%+.3f dB), "
                 "sharpness ratio %.3f, %.0fs",
                 static_cast<long long>(st.step), psnr, base, psnr - base, ratio, secs)};
}

Outcome TtaBehaviour(DeskData& data, const JointRun& run) {
  if (!run.state) return {false, "no checkpoint from criterion 4: " + run.error};
  const auto start = Clock::now();
  const Network& deblur = run.state->deblur;
  const Network& reblur = run.state->reblur;
  const auto d0 = deblur.ParameterDigest(), r0 = reblur.ParameterDigest();
  const Dataset held = data.heldout();
  TtaConfig cfg;
  cfg.steps = 5;
  cfg.lr = 3e-6;
  int decreased = 0;
  double worst_mean = 0.0;
  std::vector<TtaResult> results;
  for (const ImagePair& p : held.pairs) {
    results.push_back(Adapt(p.blurry, deblur, reblur, cfg));
    const TtaResult& r = results.back();
    if (r.self_loss[5] <= r.self_loss[0]) ++decreased;
    for (int c = 0; c < 3; ++c) {
      const auto a = r.adapted.plane(c), i = r.initial.plane(c);
      double ma = 0.0, mi = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        ma += a[k];
        mi += i[k];
      }
      worst_mean = std::max(worst_mean, std::abs(ma - mi) / static_cast<double>(a.size()));
    }
  }
  const bool frozen = deblur.ParameterDigest() == d0 && reblur.ParameterDigest() == r0;
  // Re-adapting the first image after all others must reproduce it exactly.
  const TtaResult again = Adapt(held.pairs[0].blurry, deblur, reblur, cfg);
  const bool isolated =
      again.adapted == results[0].adapted && again.self_loss == results[0].self_loss;
  const double fraction = static_cast<double>(decreased) / static_cast<double>(held.size());
  const double secs = Seconds(start);
  return {fraction >= 0.8 && frozen && isolated && worst_mean <= 2.0 / 256 && secs <= 300,
          Format("self-loss non-increasing on %d/%zu images, networks %s, isolation %s, "
                 "worst channel-mean shift %.2e (limit %.2e), %.1fs",
                 decreased, held.size(), frozen ? "unchanged" : "CHANGED",
                 isolated ? "exact" : "BROKEN", worst_mean, 2.0 / 256, secs)};
}

// --- 6 ----------------------------------------------------------------------

Outcome KernelOracle() {
  const auto start = Clock::now();
  const ImageTensor sharp = RenderProceduralScene(17, 64, 64);
  const BlurKernel truth = MakeMotionKernel(7.0, 0.6, 9);
  const double ncc =
      KernelCorrelation(EstimateResidualKernel(sharp, ApplyBlur(sharp, truth), 9), truth);
  const BlurKernel delta = EstimateResidualKernel(sharp, sharp, 9);
  const double ncc_delta = KernelCorrelation(delta, BlurKernel::Delta(9));
  const auto w = delta.weights();
  const bool centred = std::max_element(w.begin(), w.end()) - w.begin() == 40;
  return {ncc > 0.99 && ncc_delta > 0.99 && centred,
          Format("motion kernel ncc %.5f, B=L ncc to delta %.5f (peak %s), %.2fs", ncc,
                 ncc_delta, centred ? "centred" : "off-centre", Seconds(start))};
}

// --- 7 ----------------------------------------------------------------------

Outcome MetricExactness() {
  const ImageTensor a = RandomImage(1, 32, 32, 0.0, 0.9);
  ImageTensor b = a;
  const double offset = 16.0 / 255.0;
  for (double& v : b.pixels()) v += offset;
  const double psnr_err = std::abs(Psnr(a, b) - 10.0 * std::log10(1.0 / (offset * offset)));

  ImageTensor c = a;
  const ImageTensor noise = RandomImage(2, 32, 32, -0.2, 0.2);
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.pixels()[i] = std::clamp(c.pixels()[i] + noise.pixels()[i], 0.0, 1.0);
  }
  const double ssim_err = std::abs(SsimPerChannel(a, c) - testing::SsimOracle(a, c));
  const double self = SsimPerChannel(a, a);
  return {psnr_err <= 1e-9 && ssim_err <= 1e-8 && std::abs(self - 1.0) <= 1e-12,
          Format("psnr error %.1e dB, ssim error %.1e, ssim(a,a) = %.15f", psnr_err, ssim_err,
                 self)};
}

// --- 8 ----------------------------------------------------------------------

Outcome ScheduleExactness() {
  const std::pair<int, double> expected[] = {
      {0, 1e-4},       {1999, 1e-4},    {2000, 5e-5},     {2999, 5e-5},
      {3000, 2.5e-5},  {3599, 2.5e-5},  {3600, 1.25e-5},  {3999, 1.25e-5}};
  std::string bad;
  for (const auto& [epoch, lr] : expected) {
    const double got = LrSchedule(epoch, 4000, 1e-4);
    if (got != lr) bad += Format(" epoch %d gave %.17g;", epoch, got);
  }
  return {bad.empty(), bad.empty() ? "1e-4, 5e-5, 2.5e-5, 1.25e-5 at the boundaries" : bad};
}

// --- 9 ----------------------------------------------------------------------

int Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "reblur");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  const int rc = cli::Main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  return rc;
}

// Every regular file under `dir` except the run manifest, which records
// wall-clock timestamps.
std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "run_manifest.yaml") {
      files[fs::relative(e.path(), dir).string()] = ReadFileBytes(e.path());
    }
  }
  return files;
}

Outcome Determinism() {
  const auto start = Clock::now();
  TempDir dir;
  const fs::path config = dir / "run.yaml";
  std::ofstream(config) << "seed: 5\n"
                           "data:\n  source_dir: sources\n  generate_sources: 3\n"
                           "  source_size: 64\n  patch_size: 32\n  count: 10\n  holdout: 3\n"
                           "deblur:\n  base_channels: 4\n  mid_channels: [6, 8]\n"
                           "  num_resblocks: 1\n"
                           "reblur:\n  channels: 4\n  num_resblocks: 1\n"
                           "train:\n  epochs: 3\n  batch_size: 2\n  initial_lr: 0.001\n"
                           "  crop_size: 16\n"
                           "tta:\n  steps: 3\n  lr: 0.0001\n";
  const std::string cfg = config.string();
  const auto out = [&](const std::string& name) { return (dir / name).string(); };
  std::vector<std::string> broken;
  const auto run = [&](std::vector<std::string> args) {
    if (Cli(args) != cli::kExitOk) broken.push_back("command failed: " + args[0]);
  };
  const auto same = [&](const std::string& a, const std::string& b, const std::string& what) {
    if (Snapshot(out(a)) != Snapshot(out(b))) broken.push_back(what + " differs");
  };

  for (const char* name : {"ds1", "ds2"}) run({"synth", "--config", cfg, "--out", out(name)});
  same("ds1", "ds2", "synth");
  const auto with_data = [&](const std::string& verb, const std::string& o) {
    return std::vector<std::string>{verb, "--config", cfg, "--dataset", out("ds1"), "--out",
                                    out(o)};
  };
  run(with_data("train", "t1"));
  run(with_data("train", "t2"));
  same("t1", "t2", "train");
  const std::string ckpt = out("t1") + "/checkpoint.ckpt";
  for (const char* name : {"e1", "e2"}) {
    auto a = with_data("eval", name);
    a.insert(a.end(), {"--checkpoint", ckpt, "--kernels"});
    run(a);
  }
  same("e1", "e2", "eval");
  for (const char* name : {"a1", "a2"}) {
    auto a = with_data("tta", name);
    a.insert(a.end(), {"--checkpoint", ckpt});
    run(a);
  }
  same("a1", "a2", "tta");

  auto first = with_data("train", "r");
  first.insert(first.end(), {"--stop-after-epoch", "1"});
  run(first);
  auto resume = with_data("train", "r");
  resume.insert(resume.end(), {"--checkpoint", out("r") + "/checkpoint.ckpt"});
  run(resume);
  if (ReadFileBytes(out("r") + "/checkpoint.ckpt") != ReadFileBytes(ckpt) ||
      ReadFileBytes(out("r") + "/losses.csv") != ReadFileBytes(out("t1") + "/losses.csv")) {
    broken.push_back("resumed run differs from uninterrupted run");
  }
  std::string detail;
  for (const std::string& m : broken) detail += (detail.empty() ? "" : "; ") + m;
  return {broken.empty(),
          (broken.empty() ? std::string("synth/train/eval/tta reruns and resume bit-identical")
                          : detail) +
              Format(", %.1fs", Seconds(start))};
}

}  // namespace
}  // namespace reblur

int main(int argc, char** argv) {
  using namespace reblur;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const auto wanted = [&](int n) { return only.empty() || only.count(n) > 0; };

  // Default-strength blur for the capacity trend, milder blur for joint training.
  DeskData default_blur(3.0, 9.0);
  DeskData data(2.0, 3.0);
  JointRun joint;
  int failures = 0;
  const auto report = [&](int n, const std::function<Outcome()>& fn) {
    if (!wanted(n)) return;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, GradientCorrectness);
  report(2, DetachmentContracts);
  report(3, [&] { return CapacityTrend(default_blur); });
  if (wanted(4) || wanted(5)) {
    report(4, [&] { return JointEfficacy(data, joint); });
    if (!wanted(4)) {
      // Criterion 5 alone still needs the criterion 4 training run.
      try {
        joint.state = Train(JointTraining(), data.train(),
                            InitTrainState(JointDeblur(), JointReblur(), kSeed));
      } catch (const std::exception& e) {
        joint.error = e.what();
      }
    }
    report(5, [&] { return TtaBehaviour(data, joint); });
  }
  report(6, KernelOracle);
  report(7, MetricExactness);
  report(8, ScheduleExactness);
  report(9, Determinism);
  return failures == 0 ? 0 : 1;
}
