#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "reblur/cli/commands.h"
#include "reblur/cli/config.h"
#include "reblur/data/png_io.h"
#include "reblur/models/checkpoint.h"
#include "test_util.h"

namespace reblur::cli {
namespace {

namespace fs = std::filesystem;
using reblur::testing::ReadFileBytes;
using reblur::testing::TempDir;

int Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "reblur");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  return Main(static_cast<int>(argv.size()), argv.data());
}

std::string ReadText(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int CountLines(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

constexpr char kConfig[] = R"(seed: 3
data:
  source_dir: sources
  generate_sources: 2
  source_size: 48
  patch_size: 16
  count: 6
  holdout: 2
deblur:
  base_channels: 2
  mid_channels: [3, 4]
  num_resblocks: 1
reblur:
  channels: 2
  num_resblocks: 1
train:
  epochs: 2
  batch_size: 2
  initial_lr: 0.001
tta:
  steps: 2
  lr: 0.001
sweep:
  capacity_resblocks: [1, 2]
  reblur_n: [0, 1]
  tta_steps: [0, 1, 2]
)";

// A synthesized dataset shared by the tests of one fixture instance.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = dir_ / "run.yaml";
    std::ofstream(config_) << kConfig;
    ASSERT_EQ(Cli({"synth", "--config", config_, "--out", dir_ / "ds"}), kExitOk);
  }

  std::vector<std::string> Common(const std::string& verb, const std::string& out) {
    return {verb, "--config", config_, "--dataset", dir_ / "ds", "--out", dir_ / out};
  }

  TempDir dir_;
  fs::path config_;
};

TEST_F(CliTest, SynthWritesManifests) {
  EXPECT_TRUE(fs::exists(dir_ / "ds/manifest.yaml"));
  EXPECT_TRUE(fs::exists(dir_ / "ds/run_manifest.yaml"));
  EXPECT_FALSE(fs::exists(dir_ / "ds/.reblur.lock"));
  const std::string m = ReadText(dir_ / "ds/run_manifest.yaml");
  for (const char* key : {"tool:", "version:", "command: synth", "seed: 3", "config:",
                          "artifacts:", "started_utc:", "finished_utc:"}) {
    EXPECT_NE(m.find(key), std::string::npos) << key;
  }
}

TEST_F(CliTest, SynthRerunIsBitIdentical) {
  ASSERT_EQ(Cli({"synth", "--config", config_, "--out", dir_ / "ds2"}), kExitOk);
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "ds")) {
    if (!e.is_regular_file() || e.path().filename() == "run_manifest.yaml") continue;
    const fs::path rel = fs::relative(e.path(), dir_ / "ds");
    EXPECT_EQ(ReadFileBytes(e.path()), ReadFileBytes(dir_ / "ds2" / rel)) << rel;
  }
}

TEST_F(CliTest, TrainRerunAndResumeAreBitIdentical) {
  ASSERT_EQ(Cli(Common("train", "a")), kExitOk);
  ASSERT_EQ(Cli(Common("train", "b")), kExitOk);
  EXPECT_EQ(ReadFileBytes(dir_ / "a/checkpoint.ckpt"), ReadFileBytes(dir_ / "b/checkpoint.ckpt"));

  auto first = Common("train", "c");
  first.insert(first.end(), {"--stop-after-epoch", "1"});
  ASSERT_EQ(Cli(first), kExitOk);
  EXPECT_EQ(LoadCheckpoint(dir_ / "c/checkpoint.ckpt").epoch, 1);
  auto resume = Common("train", "c");
  resume.insert(resume.end(), {"--checkpoint", (dir_ / "c/checkpoint.ckpt").string()});
  ASSERT_EQ(Cli(resume), kExitOk);
  EXPECT_EQ(ReadFileBytes(dir_ / "a/checkpoint.ckpt"), ReadFileBytes(dir_ / "c/checkpoint.ckpt"));
  EXPECT_EQ(ReadFileBytes(dir_ / "a/losses.csv"), ReadFileBytes(dir_ / "c/losses.csv"));
  // 4 training pairs, batch 2, 2 epochs.
  EXPECT_EQ(CountLines(dir_ / "a/losses.csv"), 1 + 4);
}

TEST_F(CliTest, ResumeWithDifferentArchitectureIsAUserError) {
  ASSERT_EQ(Cli(Common("train", "a")), kExitOk);
  std::string other = kConfig;
  other.replace(other.find("num_resblocks: 1"), 16, "num_resblocks: 2");
  std::ofstream(dir_ / "other.yaml") << other;
  EXPECT_EQ(Cli({"train", "--config", dir_ / "other.yaml", "--dataset", dir_ / "ds", "--out",
                 dir_ / "x", "--checkpoint", dir_ / "a/checkpoint.ckpt"}),
            kExitUserError);
}

TEST_F(CliTest, EvalTtaAndKernels) {
  ASSERT_EQ(Cli(Common("train", "t")), kExitOk);
  const std::string ckpt = dir_ / "t/checkpoint.ckpt";
  auto eval = Common("eval", "e");
  eval.insert(eval.end(), {"--checkpoint", ckpt, "--kernels"});
  ASSERT_EQ(Cli(eval), kExitOk);
  EXPECT_EQ(CountLines(dir_ / "e/metrics.csv"), 1 + 2 + 1);
  EXPECT_EQ(CountLines(dir_ / "e/metrics_blurry.csv"), 1 + 2 + 1);
  int kernel_pngs = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "e/kernels")) {
    ++kernel_pngs;
    const ImageTensor k = ReadPng(e.path());
    EXPECT_EQ(k.height(), 9 * 16);
  }
  EXPECT_EQ(kernel_pngs, 2 * 3);

  // Zero adaptation steps reproduce the plain deblurred output.
  auto tta0 = Common("tta", "z");
  tta0.insert(tta0.end(), {"--checkpoint", ckpt, "--steps", "0"});
  ASSERT_EQ(Cli(tta0), kExitOk);
  for (const auto& e : fs::directory_iterator(dir_ / "e/deblurred")) {
    EXPECT_EQ(ReadFileBytes(e.path()), ReadFileBytes(dir_ / "z/adapted" / e.path().filename()));
  }

  auto tta = Common("tta", "u");
  tta.insert(tta.end(), {"--checkpoint", ckpt});
  ASSERT_EQ(Cli(tta), kExitOk);
  // One row per (image, step), steps 0..2.
  EXPECT_EQ(CountLines(dir_ / "u/self_loss.csv"), 1 + 2 * 3);
  ASSERT_EQ(Cli({"tta", "--config", config_, "--dataset", dir_ / "ds", "--out", dir_ / "u2",
                 "--checkpoint", ckpt}),
            kExitOk);
  EXPECT_EQ(ReadFileBytes(dir_ / "u/self_loss.csv"), ReadFileBytes(dir_ / "u2/self_loss.csv"));
  for (const auto& e : fs::directory_iterator(dir_ / "u/adapted")) {
    EXPECT_EQ(ReadFileBytes(e.path()), ReadFileBytes(dir_ / "u2/adapted" / e.path().filename()));
  }

  // Explicit image paths, without a dataset.
  const std::string img = (dir_ / "ds/blurry").string() + "/" +
                          fs::directory_iterator(dir_ / "ds/blurry")->path().filename().string();
  ASSERT_EQ(Cli({"tta", "--config", config_, "--out", dir_ / "v", "--checkpoint", ckpt, img}),
            kExitOk);
  EXPECT_EQ(CountLines(dir_ / "v/self_loss.csv"), 1 + 3);
}

TEST_F(CliTest, EvalOfFreshCheckpointMatchesBlurryBaseline) {
  auto train = Common("train", "f");
  train.insert(train.end(), {"--stop-after-epoch", "0"});
  ASSERT_EQ(Cli(train), kExitOk);
  auto eval = Common("eval", "fe");
  eval.insert(eval.end(), {"--checkpoint", (dir_ / "f/checkpoint.ckpt").string()});
  ASSERT_EQ(Cli(eval), kExitOk);
  std::string a = ReadText(dir_ / "fe/metrics.csv");
  std::string b = ReadText(dir_ / "fe/metrics_blurry.csv");
  EXPECT_EQ(a, b);
}

TEST_F(CliTest, SweepsAndReport) {
  auto cap = Common("sweep", "s");
  cap.insert(cap.end(), {"--kind", "capacity"});
  ASSERT_EQ(Cli(cap), kExitOk);
  EXPECT_EQ(CountLines(dir_ / "s/capacity.csv"), 1 + 2);
  EXPECT_TRUE(fs::exists(dir_ / "s/capacity.png"));

  auto rn = Common("sweep", "s");
  rn.insert(rn.end(), {"--kind", "reblur_n"});
  ASSERT_EQ(Cli(rn), kExitOk);
  EXPECT_EQ(CountLines(dir_ / "s/reblur_n.csv"), 1 + 2);

  ASSERT_EQ(Cli(Common("train", "t")), kExitOk);
  auto ts = Common("sweep", "s");
  ts.insert(ts.end(), {"--kind", "tta_steps", "--checkpoint", (dir_ / "t/checkpoint.ckpt").string()});
  ASSERT_EQ(Cli(ts), kExitOk);
  EXPECT_EQ(CountLines(dir_ / "s/tta_steps.csv"), 1 + 3);
  EXPECT_EQ(CountLines(dir_ / "s/tta_steps_per_image.csv"), 1 + 2);

  ASSERT_EQ(Cli({"report", "--run", dir_ / "s"}), kExitOk);
  const std::string md = ReadText(dir_ / "s/report.md");
  EXPECT_NE(md.find("capacity.csv"), std::string::npos);
  EXPECT_NE(md.find("tta_steps.png"), std::string::npos);

  auto bad = Common("sweep", "s");
  bad.insert(bad.end(), {"--kind", "nope"});
  EXPECT_EQ(Cli(bad), kExitUserError);
}

TEST_F(CliTest, LockedOutputDirectoryIsRefused) {
  fs::create_directories(dir_ / "busy");
  std::ofstream(dir_ / "busy/.reblur.lock") << "1\n";
  EXPECT_EQ(Cli(Common("train", "busy")), kExitUserError);
  EXPECT_FALSE(fs::exists(dir_ / "busy/checkpoint.ckpt"));
  EXPECT_TRUE(fs::exists(dir_ / "busy/.reblur.lock"));
}

TEST_F(CliTest, MissingInputsAreUserErrors) {
  EXPECT_EQ(Cli({"train", "--config", config_, "--dataset", dir_ / "nowhere", "--out", dir_ / "n"}),
            kExitUserError);
  auto eval = Common("eval", "n2");
  EXPECT_EQ(Cli(eval), kExitUserError);  // no --checkpoint
  eval.insert(eval.end(), {"--checkpoint", (dir_ / "missing.ckpt").string()});
  EXPECT_EQ(Cli(eval), kExitUserError);
}

TEST(CliErrors, MissingSourceDirectory) {
  TempDir dir;
  std::ofstream(dir / "c.yaml") << "data:\n  source_dir: absent\n  count: 2\n";
  EXPECT_EQ(Cli({"synth", "--config", dir / "c.yaml", "--out", dir / "o"}), kExitUserError);
}

TEST(CliErrors, UsageErrors) {
  EXPECT_EQ(Cli({}), kExitUserError);
  EXPECT_EQ(Cli({"frobnicate"}), kExitUserError);
  EXPECT_EQ(Cli({"train", "--no-such-flag"}), kExitUserError);
  EXPECT_EQ(Cli({"train", "--config", "/nonexistent/run.yaml"}), kExitUserError);
}

TEST(CliErrors, OutputRootEnvironment) {
  TempDir dir;
  std::ofstream(dir / "c.yaml") << "data:\n  source_dir: src\n  generate_sources: 1\n"
                                   "  source_size: 32\n  patch_size: 16\n  count: 2\n";
  setenv("REBLUR_OUTPUT_ROOT", (dir / "root").c_str(), 1);
  const int rc = Cli({"synth", "--config", dir / "c.yaml"});
  unsetenv("REBLUR_OUTPUT_ROOT");
  EXPECT_EQ(rc, kExitOk);
  EXPECT_TRUE(fs::exists(dir / "root/synth/manifest.yaml"));
}

TEST(ConfigParse, ErrorsCarryLineNumbers) {
  try {
    ParseRunConfig("seed: 1\ntrain:\n  epochs: many\n", "run.yaml", ".");
    FAIL();
  } catch (const UserError& e) {
    EXPECT_NE(std::string(e.what()).find("run.yaml:3"), std::string::npos) << e.what();
  }
  try {
    ParseRunConfig("seed: 1\ndeblur:\n  base_channels: 4\n  wings: 2\n", "run.yaml", ".");
    FAIL();
  } catch (const UserError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("run.yaml:4"), std::string::npos) << msg;
    EXPECT_NE(msg.find("wings"), std::string::npos) << msg;
  }
  EXPECT_THROW(ParseRunConfig("bogus: 1\n", "run.yaml", "."), UserError);
  EXPECT_THROW(ParseRunConfig("train: [1, 2\n", "run.yaml", "."), UserError);
}

TEST(ConfigParse, ValuesSeedAndPaths) {
  const RunConfig c = ParseRunConfig(
      "seed: 11\ndata:\n  source_dir: imgs\n  kernel_length_range: [2, 5]\n"
      "train:\n  mode: deblur_only\n  reblur_objective: blur_only\n  milestones: [0.5]\n",
      "run.yaml", "/base");
  EXPECT_EQ(c.data.synth.seed, 11u);
  EXPECT_EQ(c.train.seed, 11u);
  EXPECT_EQ(c.data.synth.source_dir, fs::path("/base/imgs"));
  EXPECT_EQ(c.data.synth.kernel_length_min, 2.0);
  EXPECT_EQ(c.data.synth.kernel_length_max, 5.0);
  EXPECT_EQ(c.train.mode, TrainMode::kDeblurOnly);
  EXPECT_EQ(c.train.reblur_objective, ReblurObjective::kBlurOnly);
  EXPECT_EQ(c.train.milestones, std::vector<double>{0.5});
  // Emitting and re-parsing is lossless.
  const RunConfig again = ParseRunConfig(EmitRunConfig(c), "emitted", "/elsewhere");
  EXPECT_EQ(EmitRunConfig(again), EmitRunConfig(c));
}

}  // namespace
}  // namespace reblur::cli
