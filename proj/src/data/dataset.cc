#include "reblur/data/dataset.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "reblur/data/atomic_file.h"
#include "reblur/data/png_io.h"
#include "reblur/data/random.h"

namespace reblur {
namespace fs = std::filesystem;

namespace {

constexpr char kManifestName[] = "manifest.yaml";
constexpr char kManifestFormat[] = "reblur-dataset/1";

std::vector<fs::path> ListPngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw std::invalid_argument("source_dir " + dir.string() +
                                " does not exist or is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

ImageTensor FlipHorizontal(const ImageTensor& image) {
  ImageTensor out(image.height(), image.width());
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < image.height(); ++y) {
      for (int x = 0; x < image.width(); ++x) {
        out.at(c, y, x) = image.at(c, y, image.width() - 1 - x);
      }
    }
  }
  return out;
}

ImagePair MakePair(const ImageTensor& source, const PairRecord& rec,
                   int patch_size) {
  ImageTensor sharp = source.Crop(rec.crop_y, rec.crop_x, patch_size, patch_size);
  if (rec.flipped) sharp = FlipHorizontal(sharp);
  BlurKernel kernel =
      MakeMotionKernel(rec.motion.length, rec.motion.angle, rec.motion.size);
  ImageTensor blurry = ApplyBlur(sharp, kernel);
  return ImagePair{std::move(blurry), std::move(sharp), std::move(kernel)};
}

std::string PairFileName(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu.png", id);
  return buf;
}

// --- procedural scenes ------------------------------------------------------

using Rgb = std::array<double, 3>;

Rgb RandomColor(std::mt19937_64& gen) {
  return {UniformDouble(gen), UniformDouble(gen), UniformDouble(gen)};
}

struct Shape {
  enum Kind { kEllipse, kRect, kLine } kind;
  double cx, cy, a, b, theta;
  Rgb color, color2;
  bool striped;
  double stripe_freq, stripe_phase;

  bool Contains(double px, double py) const {
    const double dx = px - cx;
    const double dy = py - cy;
    const double u = dx * std::cos(theta) + dy * std::sin(theta);
    const double v = -dx * std::sin(theta) + dy * std::cos(theta);
    switch (kind) {
      case kEllipse:
        return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
      case kRect:
        return std::abs(u) <= a && std::abs(v) <= b;
      case kLine:
        return std::abs(u) <= a && std::abs(v) <= b;  // b is half width
    }
    return false;
  }

  Rgb ColorAt(double px, double py) const {
    if (!striped) return color;
    const double u = (px - cx) * std::cos(theta) + (py - cy) * std::sin(theta);
    return std::sin(stripe_freq * u + stripe_phase) > 0.0 ? color : color2;
  }
};

}  // namespace

void DatasetConfig::Validate() const {
  if (patch_size <= 0) throw std::invalid_argument("patch_size must be positive");
  if (kernel_size <= 0 || kernel_size % 2 == 0) {
    throw std::invalid_argument("kernel_size must be odd and positive");
  }
  if (patch_size < kernel_size) {
    throw std::invalid_argument("patch_size must be >= kernel_size");
  }
  if (kernel_length_min < 0.0 || kernel_length_max > kernel_size ||
      kernel_length_min > kernel_length_max) {
    throw std::invalid_argument(
        "kernel_length_range must satisfy 0 <= min <= max <= kernel_size");
  }
}

Dataset SynthesizeDataset(const DatasetConfig& config) {
  config.Validate();
  const std::vector<fs::path> files = ListPngs(config.source_dir);
  if (files.empty()) {
    throw std::invalid_argument("source_dir " + config.source_dir.string() +
                                " contains no PNG images");
  }
  std::vector<ImageTensor> sources;
  sources.reserve(files.size());
  for (const fs::path& f : files) {
    ImageTensor img = ReadPng(f);
    if (img.height() < config.patch_size || img.width() < config.patch_size) {
      throw std::invalid_argument(f.string() + " is smaller than patch_size " +
                                  std::to_string(config.patch_size));
    }
    sources.push_back(std::move(img));
  }

  Dataset out;
  out.pairs.reserve(config.count);
  out.records.reserve(config.count);
  for (std::size_t i = 0; i < config.count; ++i) {
    std::mt19937_64 gen(StreamSeed(config.seed, i));
    PairRecord rec;
    rec.id = i;
    const std::size_t src = UniformIndex(gen, sources.size());
    const ImageTensor& image = sources[src];
    rec.source = files[src].filename().string();
    rec.crop_y = static_cast<int>(
        UniformIndex(gen, image.height() - config.patch_size + 1));
    rec.crop_x = static_cast<int>(
        UniformIndex(gen, image.width() - config.patch_size + 1));
    const bool flip_draw = UniformDouble(gen) < 0.5;
    rec.flipped = config.random_flips && flip_draw;
    rec.motion.length = UniformDouble(gen, config.kernel_length_min,
                                      config.kernel_length_max);
    rec.motion.angle = UniformDouble(gen, 0.0, std::numbers::pi);
    rec.motion.size = config.kernel_size;
    out.pairs.push_back(MakePair(image, rec, config.patch_size));
    out.records.push_back(std::move(rec));
  }
  return out;
}

fs::path SaveDataset(const fs::path& dir, const Dataset& dataset,
                     const DatasetConfig& config) {
  fs::create_directories(dir / "blurry");
  fs::create_directories(dir / "sharp");
  YAML::Emitter em;
  em.SetDoublePrecision(17);
  em << YAML::BeginMap;
  em << YAML::Key << "format" << YAML::Value << kManifestFormat;
  em << YAML::Key << "seed" << YAML::Value << config.seed;
  em << YAML::Key << "config" << YAML::Value << YAML::BeginMap;
  em << YAML::Key << "source_dir" << YAML::Value << config.source_dir.string();
  em << YAML::Key << "patch_size" << YAML::Value << config.patch_size;
  em << YAML::Key << "kernel_size" << YAML::Value << config.kernel_size;
  em << YAML::Key << "kernel_length_range" << YAML::Value << YAML::Flow
     << YAML::BeginSeq << config.kernel_length_min << config.kernel_length_max
     << YAML::EndSeq;
  em << YAML::Key << "count" << YAML::Value << config.count;
  em << YAML::Key << "random_flips" << YAML::Value << config.random_flips;
  em << YAML::EndMap;
  em << YAML::Key << "pairs" << YAML::Value << YAML::BeginSeq;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const std::string name = PairFileName(i);
    WritePng(dir / "blurry" / name, dataset.pairs[i].blurry);
    WritePng(dir / "sharp" / name, dataset.pairs[i].sharp);
    em << YAML::BeginMap;
    em << YAML::Key << "id" << YAML::Value << i;
    em << YAML::Key << "blurry" << YAML::Value << "blurry/" + name;
    em << YAML::Key << "sharp" << YAML::Value << "sharp/" + name;
    if (i < dataset.records.size()) {
      const PairRecord& r = dataset.records[i];
      em << YAML::Key << "source" << YAML::Value << r.source;
      em << YAML::Key << "crop" << YAML::Value << YAML::Flow << YAML::BeginSeq
         << r.crop_y << r.crop_x << YAML::EndSeq;
      em << YAML::Key << "flipped" << YAML::Value << r.flipped;
      em << YAML::Key << "kernel" << YAML::Value << YAML::Flow << YAML::BeginMap
         << YAML::Key << "length" << YAML::Value << r.motion.length
         << YAML::Key << "angle" << YAML::Value << r.motion.angle
         << YAML::Key << "size" << YAML::Value << r.motion.size << YAML::EndMap;
    }
    em << YAML::EndMap;
  }
  em << YAML::EndSeq << YAML::EndMap;
  const fs::path manifest = dir / kManifestName;
  AtomicWriteText(manifest, std::string(em.c_str()) + "\n");
  return manifest;
}

Dataset LoadDataset(const fs::path& dir) {
  const fs::path manifest = dir / kManifestName;
  if (!fs::exists(manifest)) {
    throw std::invalid_argument("no " + std::string(kManifestName) + " in " +
                                dir.string());
  }
  YAML::Node root = YAML::LoadFile(manifest.string());
  if (root["format"].as<std::string>("") != kManifestFormat) {
    throw std::runtime_error(manifest.string() + ": unsupported manifest format");
  }
  Dataset out;
  for (const YAML::Node& entry : root["pairs"]) {
    ImagePair pair;
    pair.blurry = ReadPng(dir / entry["blurry"].as<std::string>());
    pair.sharp = ReadPng(dir / entry["sharp"].as<std::string>());
    if (!pair.blurry.SameShape(pair.sharp)) {
      throw std::runtime_error("pair " + entry["id"].as<std::string>() +
                               ": blurry and sharp shapes differ");
    }
    if (entry["kernel"]) {
      PairRecord rec;
      rec.id = entry["id"].as<std::size_t>();
      rec.source = entry["source"].as<std::string>("");
      if (entry["crop"]) {
        rec.crop_y = entry["crop"][0].as<int>();
        rec.crop_x = entry["crop"][1].as<int>();
      }
      rec.flipped = entry["flipped"].as<bool>(false);
      rec.motion.length = entry["kernel"]["length"].as<double>();
      rec.motion.angle = entry["kernel"]["angle"].as<double>();
      rec.motion.size = entry["kernel"]["size"].as<int>();
      pair.kernel =
          MakeMotionKernel(rec.motion.length, rec.motion.angle, rec.motion.size);
      out.records.push_back(std::move(rec));
    }
    out.pairs.push_back(std::move(pair));
  }
  if (!out.records.empty() && out.records.size() != out.pairs.size()) {
    out.records.clear();
  }
  return out;
}

std::pair<Dataset, Dataset> SplitHoldout(const Dataset& dataset,
                                         std::size_t holdout) {
  if (holdout >= dataset.size()) {
    throw std::invalid_argument("holdout must leave at least one training pair");
  }
  const std::size_t cut = dataset.size() - holdout;
  Dataset train, test;
  const bool has_records = dataset.records.size() == dataset.size();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    Dataset& dst = i < cut ? train : test;
    dst.pairs.push_back(dataset.pairs[i]);
    if (has_records) dst.records.push_back(dataset.records[i]);
  }
  return {std::move(train), std::move(test)};
}

ImageTensor RenderProceduralScene(std::uint64_t seed, int height, int width) {
  std::mt19937_64 gen(StreamSeed(seed, 0x5ce9e));
  ImageTensor img(height, width);

  // Background: linear gradient between two colours.
  const Rgb c0 = RandomColor(gen);
  const Rgb c1 = RandomColor(gen);
  const double g_angle = UniformDouble(gen, 0.0, 2.0 * std::numbers::pi);
  const double gx = std::cos(g_angle), gy = std::sin(g_angle);
  const double extent = std::abs(gx) * width + std::abs(gy) * height;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double t =
          std::clamp(0.5 + ((x - width / 2.0) * gx + (y - height / 2.0) * gy) / extent,
                     0.0, 1.0);
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = (1 - t) * c0[c] + t * c1[c];
    }
  }

  // Dead-leaves style occlusion: sizes follow a 1/r^3 law, so the scene
  // has structure at every scale like a photograph.
  const double scale = std::min(height, width);
  const double r_min = 4.0;
  const double r_max = std::max(r_min + 1.0, 0.3 * scale);
  const auto leaf_size = [&] {
    const double u = UniformDouble(gen);
    const double lo = 1.0 / (r_min * r_min), hi = 1.0 / (r_max * r_max);
    return 1.0 / std::sqrt(lo - u * (lo - hi));
  };
  const int n_shapes = height * width / 80 +
                       static_cast<int>(UniformIndex(gen, height * width / 160 + 1));
  for (int s = 0; s < n_shapes; ++s) {
    Shape shape;
    const std::uint64_t kind = UniformIndex(gen, 5);
    shape.kind = kind < 2 ? Shape::kEllipse : (kind < 4 ? Shape::kRect : Shape::kLine);
    shape.cx = UniformDouble(gen, 0.0, width);
    shape.cy = UniformDouble(gen, 0.0, height);
    shape.a = leaf_size();
    shape.b = shape.kind == Shape::kLine ? UniformDouble(gen, 0.6, 2.0)
                                         : shape.a * UniformDouble(gen, 0.3, 1.0);
    shape.theta = UniformDouble(gen, 0.0, std::numbers::pi);
    shape.color = RandomColor(gen);
    shape.color2 = RandomColor(gen);
    shape.striped = shape.kind != Shape::kLine && UniformDouble(gen) < 0.3;
    shape.stripe_freq = UniformDouble(gen, 0.4, 1.5);
    shape.stripe_phase = UniformDouble(gen, 0.0, 2.0 * std::numbers::pi);

    const double reach = std::max(shape.a, shape.b) + 2.0;
    const int y0 = std::max(0, static_cast<int>(shape.cy - reach));
    const int y1 = std::min(height - 1, static_cast<int>(shape.cy + reach));
    const int x0 = std::max(0, static_cast<int>(shape.cx - reach));
    const int x1 = std::min(width - 1, static_cast<int>(shape.cx + reach));
    constexpr int kSub = 3;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        Rgb acc{0, 0, 0};
        int inside = 0;
        for (int sy = 0; sy < kSub; ++sy) {
          for (int sx = 0; sx < kSub; ++sx) {
            const double px = x + (sx + 0.5) / kSub;
            const double py = y + (sy + 0.5) / kSub;
            if (!shape.Contains(px, py)) continue;
            const Rgb col = shape.ColorAt(px, py);
            for (int c = 0; c < 3; ++c) acc[c] += col[c];
            ++inside;
          }
        }
        if (inside == 0) continue;
        const double cover = static_cast<double>(inside) / (kSub * kSub);
        for (int c = 0; c < 3; ++c) {
          img.at(c, y, x) = (1.0 - cover) * img.at(c, y, x) + acc[c] / (kSub * kSub);
        }
      }
    }
  }
  return img;
}

void WriteProceduralSources(const fs::path& dir, std::size_t count, int size,
                            std::uint64_t seed) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04zu.png", i);
    WritePng(dir / name, RenderProceduralScene(StreamSeed(seed, i), size, size),
             PngDepth::k8);
  }
}

BatchIterator::BatchIterator(std::size_t dataset_size, int batch_size,
                             std::uint64_t seed)
    : dataset_size_(dataset_size), batch_size_(batch_size), seed_(seed) {
  if (dataset_size == 0) throw std::invalid_argument("BatchIterator: empty dataset");
  if (batch_size < 1) throw std::invalid_argument("BatchIterator: batch_size < 1");
}

std::size_t BatchIterator::batches_per_epoch() const {
  return (dataset_size_ + batch_size_ - 1) / batch_size_;
}

std::vector<std::vector<std::size_t>> BatchIterator::Epoch(int epoch) const {
  std::vector<std::size_t> order(dataset_size_);
  for (std::size_t i = 0; i < dataset_size_; ++i) order[i] = i;
  std::mt19937_64 gen(StreamSeed(seed_, 0xba7c0000ULL + static_cast<std::uint64_t>(epoch)));
  for (std::size_t i = dataset_size_; i > 1; --i) {
    std::swap(order[i - 1], order[UniformIndex(gen, i)]);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < dataset_size_; start += batch_size_) {
    const std::size_t end = std::min(dataset_size_, start + batch_size_);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

}  // namespace reblur
