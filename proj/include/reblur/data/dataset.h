#ifndef REBLUR_DATA_DATASET_H_
#define REBLUR_DATA_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reblur/data/image.h"

namespace reblur {

struct MotionParams {
  double length = 0.0;
  double angle = 0.0;
  int size = 1;
};

struct ImagePair {
  ImageTensor blurry;
  ImageTensor sharp;
  std::optional<BlurKernel> kernel;  // ground truth when synthetic
};

// Where a synthesized pair came from; enough to regenerate it.
struct PairRecord {
  std::size_t id = 0;
  std::string source;  // file name inside source_dir
  int crop_y = 0;
  int crop_x = 0;
  bool flipped = false;
  MotionParams motion;
};

struct DatasetConfig {
  std::filesystem::path source_dir;
  int patch_size = 64;
  double kernel_length_min = 3.0;
  double kernel_length_max = 9.0;
  int kernel_size = 9;
  std::uint64_t seed = 0;
  std::size_t count = 200;
  bool random_flips = false;

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

struct Dataset {
  std::vector<ImagePair> pairs;
  std::vector<PairRecord> records;  // parallel to pairs; empty if unknown

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

// Deterministic in (config, seed): pair i depends only on the sorted source
// listing and on the stream (seed, i).
Dataset SynthesizeDataset(const DatasetConfig& config);

// Writes blurry/ and sharp/ 16-bit PNGs plus manifest.yaml into `dir`.
// Returns the manifest path.
std::filesystem::path SaveDataset(const std::filesystem::path& dir,
                                  const Dataset& dataset,
                                  const DatasetConfig& config);

// Loads a dataset written by SaveDataset; the manifest drives the listing and
// kernels are rebuilt from their recorded parameters.
Dataset LoadDataset(const std::filesystem::path& dir);

// Leading `dataset.size() - holdout` pairs for training, the rest held out.
std::pair<Dataset, Dataset> SplitHoldout(const Dataset& dataset,
                                         std::size_t holdout);

// Piecewise-smooth synthetic scene (gradients, shapes, stripes, lines) used
// as a stand-in for clean photographs.
ImageTensor RenderProceduralScene(std::uint64_t seed, int height, int width);

// Writes `count` procedural scenes as scene_XXXX.png into `dir`.
void WriteProceduralSources(const std::filesystem::path& dir, std::size_t count,
                            int size, std::uint64_t seed);

// Shuffled mini-batches of dataset indices. The order of epoch e is a pure
// function of (seed, e); the final partial batch is kept.
class BatchIterator {
 public:
  BatchIterator(std::size_t dataset_size, int batch_size, std::uint64_t seed);

  std::vector<std::vector<std::size_t>> Epoch(int epoch) const;
  std::size_t batches_per_epoch() const;

 private:
  std::size_t dataset_size_;
  int batch_size_;
  std::uint64_t seed_;
};

}  // namespace reblur

#endif  // REBLUR_DATA_DATASET_H_
