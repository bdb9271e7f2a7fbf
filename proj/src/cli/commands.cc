#include "reblur/cli/commands.h"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include "reblur/cli/config.h"
#include "reblur/cli/plot.h"
#include "reblur/data/atomic_file.h"
#include "reblur/data/png_io.h"
#include "reblur/data/random.h"
#include "reblur/metrics/evaluate.h"
#include "reblur/metrics/kernel_estimation.h"
#include "reblur/models/checkpoint.h"
#include "reblur/training/sweeps.h"
#include "reblur/tta/tta.h"

#ifndef REBLUR_VERSION
#define REBLUR_VERSION "0.0.0"
#endif

namespace reblur::cli {
namespace {

namespace fs = std::filesystem;

constexpr char kLockName[] = ".reblur.lock";

struct Options {
  std::string verb;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string checkpoint;
  std::string dataset;
  std::vector<std::string> args;  // the raw command line, for the manifest

  // train
  int stop_after_epoch = -1;
  // eval / tta / sweep
  bool all_pairs = false;
  bool kernels = false;
  std::optional<int> tta_steps;
  std::optional<double> tta_lr;
  std::vector<std::string> images;
  std::string kind;
  std::string run_dir;
};

std::string UtcNow() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Exclusive ownership of an output directory for the lifetime of a command.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) : path_(dir / kLockName) {
    fs::create_directories(dir);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      throw UserError("output directory " + dir.string() +
                      " is in use by another run (delete " + path_.string() +
                      " if that run is gone)");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    (void)!::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  ~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
};

RunConfig ResolveConfig(const Options& o) {
  RunConfig c;
  if (!o.config.empty()) {
    c = LoadRunConfig(o.config);
  } else {
    c.PropagateSeed();
  }
  if (o.seed) {
    c.seed = *o.seed;
    c.PropagateSeed();
  }
  if (!o.dataset.empty()) c.data.dataset_dir = fs::absolute(o.dataset);
  if (o.tta_steps) c.tta.steps = *o.tta_steps;
  if (o.tta_lr) c.tta.lr = *o.tta_lr;
  try {
    c.Validate();
  } catch (const std::invalid_argument& e) {
    throw UserError(e.what());
  }
  return c;
}

fs::path ResolveOut(const Options& o) {
  if (!o.out.empty()) return fs::absolute(o.out);
  if (const char* root = std::getenv("REBLUR_OUTPUT_ROOT"); root && *root) {
    return fs::absolute(fs::path(root) / o.verb);
  }
  return fs::absolute(fs::path("runs") / o.verb);
}

Dataset LoadConfiguredDataset(const RunConfig& c) {
  if (c.data.dataset_dir.empty()) {
    throw UserError("no dataset: pass --dataset DIR or set data.dataset_dir");
  }
  if (!fs::exists(c.data.dataset_dir / "manifest.yaml")) {
    throw UserError("no dataset manifest at " + (c.data.dataset_dir / "manifest.yaml").string() +
                    " (run `reblur synth` first)");
  }
  return LoadDataset(c.data.dataset_dir);
}

std::pair<Dataset, Dataset> Split(const RunConfig& c, const Dataset& ds) {
  if (c.data.holdout >= ds.size()) {
    throw UserError("data.holdout (" + std::to_string(c.data.holdout) +
                    ") must be smaller than the dataset (" + std::to_string(ds.size()) + ")");
  }
  return SplitHoldout(ds, c.data.holdout);
}

Dataset EvalSet(const RunConfig& c, const Dataset& ds, bool all_pairs) {
  if (all_pairs || c.data.holdout == 0) return ds;
  return Split(c, ds).second;
}

Checkpoint RequireCheckpoint(const Options& o) {
  if (o.checkpoint.empty()) throw UserError("--checkpoint is required for `" + o.verb + "`");
  if (!fs::exists(o.checkpoint)) throw UserError("checkpoint not found: " + o.checkpoint);
  return LoadCheckpoint(o.checkpoint);
}

void WriteManifest(const fs::path& out, const Options& o, const RunConfig& c,
                   const std::string& started, const std::vector<std::string>& artifacts) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "tool" << YAML::Value << "reblur";
  e << YAML::Key << "version" << YAML::Value << REBLUR_VERSION;
  e << YAML::Key << "command" << YAML::Value << o.verb;
  e << YAML::Key << "argv" << YAML::Value << YAML::Flow << o.args;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  if (!o.checkpoint.empty()) {
    e << YAML::Key << "checkpoint" << YAML::Value << fs::absolute(o.checkpoint).string();
  }
  e << YAML::Key << "config" << YAML::Value << YAML::Load(EmitRunConfig(c));
  e << YAML::Key << "artifacts" << YAML::Value << artifacts;
  e << YAML::Key << "started_utc" << YAML::Value << started;
  e << YAML::Key << "finished_utc" << YAML::Value << UtcNow();
  e << YAML::EndMap;
  AtomicWriteText(out / "run_manifest.yaml", std::string(e.c_str()) + "\n");
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// Minimal reader for the CSV files this tool writes: header + numeric rows.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int Column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw UserError("column '" + name + "' missing");
  }
  std::vector<double> Numbers(const std::string& name, bool skip_mean = true) const {
    const int col = Column(name);
    std::vector<double> v;
    for (const auto& r : rows) {
      if (skip_mean && !r.empty() && r[0] == "mean") continue;
      v.push_back(std::stod(r.at(col)));
    }
    return v;
  }
};

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

Csv ReadCsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot read " + path.string());
  Csv csv;
  std::string line;
  if (std::getline(in, line)) csv.header = SplitCsvLine(line);
  while (std::getline(in, line)) {
    if (!line.empty()) csv.rows.push_back(SplitCsvLine(line));
  }
  return csv;
}

std::vector<double> Indices(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
  return v;
}

// Plots for the CSV files a run directory may hold. Returns the file names
// written.
std::vector<std::string> PlotRunCsvs(const fs::path& dir) {
  std::vector<std::string> written;
  if (fs::exists(dir / "losses.csv")) {
    const Csv c = ReadCsv(dir / "losses.csv");
    const auto step = c.Numbers("step");
    WriteLineChart(dir / "losses.png",
                   {"training losses", "step", "loss",
                    {{"total_D", step, c.Numbers("total_D")},
                     {"total_R", step, c.Numbers("total_R")},
                     {"l1", step, c.Numbers("l1")}}});
    written.push_back("losses.png");
  }
  if (fs::exists(dir / "capacity.csv")) {
    const Csv c = ReadCsv(dir / "capacity.csv");
    const auto n = c.Numbers("num_resblocks");
    WriteLineChart(dir / "capacity.png",
                   {"deblur vs reblur psnr by capacity", "deblur resblocks", "psnr (db)",
                    {{"deblur", n, c.Numbers("deblur_psnr")},
                     {"reblur", n, c.Numbers("reblur_psnr")}}});
    written.push_back("capacity.png");
  }
  if (fs::exists(dir / "reblur_n.csv")) {
    const Csv c = ReadCsv(dir / "reblur_n.csv");
    WriteLineChart(dir / "reblur_n.png",
                   {"deblur psnr by reblur module size", "reblur resblocks (0 = l1)",
                    "psnr (db)",
                    {{"psnr", c.Numbers("reblur_resblocks"), c.Numbers("psnr")}}});
    written.push_back("reblur_n.png");
  }
  if (fs::exists(dir / "tta_steps.csv")) {
    const Csv c = ReadCsv(dir / "tta_steps.csv");
    WriteLineChart(dir / "tta_steps.png",
                   {"tta trade-off", "self-supervised reblur loss", "psnr (db)",
                    {{"psnr", c.Numbers("self_loss"), c.Numbers("psnr")}}});
    written.push_back("tta_steps.png");
  }
  if (fs::exists(dir / "metrics.csv")) {
    const Csv c = ReadCsv(dir / "metrics.csv");
    const auto psnr = c.Numbers("psnr_db");
    WriteLineChart(dir / "metrics.png",
                   {"per-image psnr", "image", "psnr (db)", {{"psnr", Indices(psnr.size()), psnr}}});
    written.push_back("metrics.png");
  }
  return written;
}

int CmdSynth(const Options& o) {
  const std::string started = UtcNow();
  const RunConfig c = ResolveConfig(o);
  const fs::path out = ResolveOut(o);
  DirectoryLock lock(out);
  const DatasetConfig& d = c.data.synth;
  if (d.source_dir.empty()) throw UserError("data.source_dir is not set");
  if (!fs::is_directory(d.source_dir)) {
    if (c.data.generate_sources == 0) {
      throw UserError("data.source_dir " + d.source_dir.string() +
                      " does not exist (create it with clean PNGs, or set "
                      "data.generate_sources to render procedural scenes)");
    }
    WriteProceduralSources(d.source_dir, c.data.generate_sources, c.data.source_size,
                           StreamSeed(c.seed, 0x5c0e));
  }
  const Dataset ds = SynthesizeDataset(d);
  const fs::path manifest = SaveDataset(out, ds, d);
  WriteManifest(out, o, c, started, {"manifest.yaml", "blurry/", "sharp/"});
  std::cout << manifest.string() << "\n";
  return kExitOk;
}

int CmdTrain(const Options& o) {
  const std::string started = UtcNow();
  const RunConfig c = ResolveConfig(o);
  const fs::path out = ResolveOut(o);
  DirectoryLock lock(out);
  const Dataset ds = LoadConfiguredDataset(c);
  const Dataset train = c.data.holdout == 0 ? ds : Split(c, ds).first;

  TrainState state = o.checkpoint.empty()
                         ? InitTrainState(c.deblur, c.reblur, c.seed)
                         : [&] {
                             if (!fs::exists(o.checkpoint)) {
                               throw UserError("checkpoint not found: " + o.checkpoint);
                             }
                             try {
                               return LoadCheckpoint(o.checkpoint, c.deblur, c.reblur);
                             } catch (const std::runtime_error& e) {
                               throw UserError(e.what());
                             }
                           }();
  if (!o.checkpoint.empty() && state.seed != c.seed) {
    throw UserError("checkpoint seed " + std::to_string(state.seed) +
                    " differs from configured seed " + std::to_string(c.seed));
  }

  TrainOptions opts;
  opts.out_dir = out;
  opts.stop_after_epoch = o.stop_after_epoch;
  const std::size_t per_epoch = (train.size() + c.train.batch_size - 1) / c.train.batch_size;
  opts.on_step = [&](std::int64_t step, int epoch, const LossReport& r) {
    if (static_cast<std::size_t>(step) % per_epoch == 0) {
      std::cerr << "epoch " << epoch + 1 << "/" << c.train.epochs << " step " << step
                << " l1=" << Fmt(r.l1) << " total_D=" << Fmt(r.total_D)
                << " total_R=" << Fmt(r.total_R) << "\n";
    }
  };
  state = Train(c.train, train, std::move(state), opts);
  SaveCheckpoint(out / "checkpoint.ckpt", state);
  WriteManifest(out, o, c, started, {"checkpoint.ckpt", "losses.csv"});
  std::cout << (out / "checkpoint.ckpt").string() << "\n";
  return kExitOk;
}

int CmdEval(const Options& o) {
  const std::string started = UtcNow();
  const RunConfig c = ResolveConfig(o);
  const fs::path out = ResolveOut(o);
  DirectoryLock lock(out);
  const Checkpoint ckpt = RequireCheckpoint(o);
  const Dataset ds = EvalSet(c, LoadConfiguredDataset(c), o.all_pairs);

  const std::vector<ImageTensor> outputs = DeblurAll(ckpt.deblur, ds);
  const MetricsReport report = EvaluateOutputs(outputs, ds);
  const MetricsReport baseline = EvaluateBlurryBaseline(ds);
  AtomicWriteText(out / "metrics.csv", report.ToCsv());
  AtomicWriteText(out / "metrics_blurry.csv", baseline.ToCsv());
  fs::create_directories(out / "deblurred");
  std::vector<std::string> artifacts{"metrics.csv", "metrics_blurry.csv", "deblurred/"};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    WritePng(out / "deblurred" / (PairId(ds, i) + ".png"), outputs[i]);
  }
  if (o.kernels) {
    fs::create_directories(out / "kernels");
    const int ksize = c.data.synth.kernel_size;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const ImagePair& p = ds.pairs[i];
      const std::string id = PairId(ds, i);
      // Remaining blur of the output and the blur of the input, both
      // relative to the sharp image.
      WriteKernelPng(out / "kernels" / (id + "_deblurred.png"),
                     EstimateResidualKernel(p.sharp, outputs[i], ksize));
      WriteKernelPng(out / "kernels" / (id + "_blurry.png"),
                     EstimateResidualKernel(p.sharp, p.blurry, ksize));
      if (p.kernel) WriteKernelPng(out / "kernels" / (id + "_true.png"), *p.kernel);
    }
    artifacts.push_back("kernels/");
  }
  WriteManifest(out, o, c, started, artifacts);
  const MetricsRow m = report.Aggregate();
  const MetricsRow b = baseline.Aggregate();
  std::cout << "pairs " << ds.size() << "  psnr " << Fmt(m.psnr_db) << " dB  ssim "
            << Fmt(m.ssim) << "  (blurry input: psnr " << Fmt(b.psnr_db) << " dB  ssim "
            << Fmt(b.ssim) << ")\n";
  return kExitOk;
}

int CmdTta(const Options& o) {
  const std::string started = UtcNow();
  const RunConfig c = ResolveConfig(o);
  const fs::path out = ResolveOut(o);
  DirectoryLock lock(out);
  const Checkpoint ckpt = RequireCheckpoint(o);

  std::vector<std::pair<std::string, ImageTensor>> inputs;
  for (const std::string& path : o.images) {
    if (!fs::exists(path)) throw UserError("image not found: " + path);
    inputs.emplace_back(fs::path(path).stem().string(), ReadPng(path));
  }
  if (!c.data.dataset_dir.empty() && (o.images.empty() || !o.dataset.empty())) {
    const Dataset ds = EvalSet(c, LoadConfiguredDataset(c), o.all_pairs);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      inputs.emplace_back(PairId(ds, i), ds.pairs[i].blurry);
    }
  }
  if (inputs.empty()) throw UserError("no input images: pass image paths or --dataset DIR");

  fs::create_directories(out / "adapted");
  std::string csv = "image,step,self_loss\n";
  for (const auto& [name, blurry] : inputs) {
    const TtaResult r = Adapt(blurry, ckpt.deblur, ckpt.reblur, c.tta);
    WritePng(out / "adapted" / (name + ".png"), r.adapted);
    for (std::size_t i = 0; i < r.self_loss.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), ",%zu,%.17g\n", i, r.self_loss[i]);
      csv += name + buf;
    }
  }
  AtomicWriteText(out / "self_loss.csv", csv);
  WriteManifest(out, o, c, started, {"adapted/", "self_loss.csv"});
  std::cout << "adapted " << inputs.size() << " image(s) with " << c.tta.steps
            << " step(s)\n";
  return kExitOk;
}

int CmdSweep(const Options& o) {
  const std::string started = UtcNow();
  const RunConfig c = ResolveConfig(o);
  const fs::path out = ResolveOut(o);
  DirectoryLock lock(out);
  std::vector<std::string> artifacts;

  if (o.kind == "capacity") {
    const auto [train, held] = Split(c, LoadConfiguredDataset(c));
    CapacitySweepConfig sc;
    sc.deblur = c.deblur;
    sc.reblur = c.reblur;
    sc.reblur.num_resblocks = c.sweep.capacity_reblur_resblocks;
    sc.deblur_training = c.train;
    sc.reblur_training = c.train;
    const auto rows = CapacitySweep(c.sweep.capacity_resblocks, train, held, sc);
    AtomicWriteText(out / "capacity.csv", CapacityCsv(rows));
    artifacts.push_back("capacity.csv");
    std::vector<double> dp, rp;
    for (const CapacityRow& r : rows) {
      dp.push_back(r.deblur_psnr);
      rp.push_back(r.reblur_psnr);
      std::cout << "n=" << r.num_resblocks << "  deblur " << Fmt(r.deblur_psnr)
                << " dB  reblur " << Fmt(r.reblur_psnr) << " dB\n";
    }
    if (rows.size() >= 2) {
      std::cout << "spearman(deblur, reblur) = " << Fmt(SpearmanCorrelation(dp, rp)) << "\n";
    }
  } else if (o.kind == "reblur_n") {
    const auto [train, held] = Split(c, LoadConfiguredDataset(c));
    const auto rows =
        ReblurSizeSweep(c.sweep.reblur_n, train, held, c.deblur, c.reblur, c.train);
    AtomicWriteText(out / "reblur_n.csv", ReblurSizeCsv(rows));
    artifacts.push_back("reblur_n.csv");
    for (const ReblurSizeRow& r : rows) {
      std::cout << "n=" << r.reblur_resblocks << "  psnr " << Fmt(r.psnr) << " dB  ssim "
                << Fmt(r.ssim) << "\n";
    }
  } else if (o.kind == "tta_steps") {
    const Checkpoint ckpt = RequireCheckpoint(o);
    const Dataset held = EvalSet(c, LoadConfiguredDataset(c), o.all_pairs);
    const TtaSweepResult r = TtaSweep(held, ckpt.deblur, ckpt.reblur, c.sweep.tta_steps, c.tta);
    AtomicWriteText(out / "tta_steps.csv", TtaSweepCsv(r));
    std::string per_image = "image";
    for (int s : c.sweep.tta_steps) per_image += ",self_loss_" + std::to_string(s);
    per_image += "\n";
    for (std::size_t i = 0; i < r.self_loss.size(); ++i) {
      per_image += PairId(held, i);
      for (double v : r.self_loss[i]) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        per_image += buf;
      }
      per_image += "\n";
    }
    AtomicWriteText(out / "tta_steps_per_image.csv", per_image);
    artifacts.insert(artifacts.end(), {"tta_steps.csv", "tta_steps_per_image.csv"});
    for (const TtaSweepRow& row : r.rows) {
      std::cout << "steps=" << row.steps << "  psnr " << Fmt(row.psnr) << " dB  ssim "
                << Fmt(row.ssim) << "  self-loss " << row.self_loss << "\n";
    }
  } else {
    throw UserError("unknown sweep kind '" + o.kind +
                    "' (expected capacity, reblur_n or tta_steps)");
  }
  for (const std::string& png : PlotRunCsvs(out)) artifacts.push_back(png);
  WriteManifest(out, o, c, started, artifacts);
  return kExitOk;
}

int CmdReport(const Options& o) {
  const fs::path dir = fs::absolute(o.run_dir.empty() ? ResolveOut(o) : fs::path(o.run_dir));
  if (!fs::is_directory(dir)) throw UserError("run directory not found: " + dir.string());
  DirectoryLock lock(dir);
  const std::vector<std::string> plots = PlotRunCsvs(dir);
  std::string md = "# Run report\n\nDirectory: `" + dir.string() + "`\n\n";
  if (fs::exists(dir / "metrics.csv")) {
    const Csv metrics = ReadCsv(dir / "metrics.csv");
    const auto& last = metrics.rows.back();
    md += "Mean PSNR " + last.at(metrics.Column("psnr_db")) + " dB, mean SSIM " +
          last.at(metrics.Column("ssim")) + "\n\n";
  }
  for (const char* name : {"capacity.csv", "reblur_n.csv", "tta_steps.csv"}) {
    if (!fs::exists(dir / name)) continue;
    std::ifstream in(dir / name);
    std::stringstream ss;
    ss << in.rdbuf();
    md += "## " + std::string(name) + "\n\n```\n" + ss.str() + "```\n\n";
  }
  for (const std::string& p : plots) md += "![" + p + "](" + p + ")\n";
  AtomicWriteText(dir / "report.md", md);
  std::cout << (dir / "report.md").string() << "\n";
  return kExitOk;
}

void AddCommon(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "YAML run configuration");
  sub->add_option("--seed", o.seed, "override the configured seed");
  sub->add_option("--out", o.out,
                  "output directory (default $REBLUR_OUTPUT_ROOT/<verb> or runs/<verb>)");
  sub->add_option("--checkpoint", o.checkpoint, "checkpoint to load or resume from");
  sub->add_option("--dataset", o.dataset, "dataset directory written by `synth`");
}

}  // namespace

int Main(int argc, const char* const* argv) {
  CLI::App app{"Image deblurring with reblurring losses", "reblur"};
  app.set_version_flag("--version", REBLUR_VERSION);
  app.require_subcommand(1);
  Options o;
  for (int i = 0; i < argc; ++i) o.args.emplace_back(argv[i]);

  auto* synth = app.add_subcommand("synth", "synthesize a motion-blur dataset");
  AddCommon(synth, o);
  auto* train = app.add_subcommand("train", "train the deblurring and reblurring modules");
  AddCommon(train, o);
  train->add_option("--stop-after-epoch", o.stop_after_epoch,
                    "stop once this many epochs are complete");
  auto* eval = app.add_subcommand("eval", "PSNR/SSIM of a checkpoint on a dataset");
  AddCommon(eval, o);
  eval->add_flag("--kernels", o.kernels, "also write residual blur kernel PNGs");
  eval->add_flag("--all", o.all_pairs, "evaluate every pair, not only the held-out split");
  auto* tta = app.add_subcommand("tta", "test-time adaptation");
  AddCommon(tta, o);
  tta->add_option("images", o.images, "blurry PNG inputs");
  tta->add_option("--steps", o.tta_steps, "adaptation steps N");
  tta->add_option("--lr", o.tta_lr, "adaptation learning rate");
  tta->add_flag("--all", o.all_pairs, "adapt every pair, not only the held-out split");
  auto* sweep = app.add_subcommand("sweep", "capacity, reblur_n or tta_steps sweep");
  AddCommon(sweep, o);
  sweep->add_option("--kind", o.kind, "capacity | reblur_n | tta_steps")->required();
  sweep->add_flag("--all", o.all_pairs, "tta_steps: use every pair");
  auto* report = app.add_subcommand("report", "plots and a summary for a run directory");
  AddCommon(report, o);
  report->add_option("--run", o.run_dir, "run directory (default: --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUserError;
  }

  try {
    o.verb = app.get_subcommands().front()->get_name();
    if (o.verb == "synth") return CmdSynth(o);
    if (o.verb == "train") return CmdTrain(o);
    if (o.verb == "eval") return CmdEval(o);
    if (o.verb == "tta") return CmdTta(o);
    if (o.verb == "sweep") return CmdSweep(o);
    return CmdReport(o);
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const YAML::Exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
}

}  // namespace reblur::cli
