#ifndef REBLUR_CLI_CONFIG_H_
#define REBLUR_CLI_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "reblur/data/dataset.h"
#include "reblur/models/network.h"
#include "reblur/training/trainer.h"
#include "reblur/tta/tta.h"

namespace reblur::cli {

// Bad input from the user: unreadable or malformed config, missing files,
// invalid flag values. Mapped to exit code 1.
class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataSection {
  DatasetConfig synth;
  std::filesystem::path dataset_dir;  // written by synth, read by the others
  std::size_t holdout = 20;           // trailing pairs held out for evaluation
  std::size_t generate_sources = 0;   // procedural scenes to create if source_dir is absent
  int source_size = 256;
};

struct SweepSection {
  std::vector<int> capacity_resblocks{1, 2, 4};
  int capacity_reblur_resblocks = 2;
  std::vector<int> reblur_n{1, 2, 3, 4};
  std::vector<int> tta_steps{0, 5, 10, 20, 30};
};

struct RunConfig {
  std::uint64_t seed = 0;
  DataSection data;
  DeblurConfig deblur;
  ReblurConfig reblur;
  TrainConfig train;
  TtaConfig tta;
  SweepSection sweep;

  // Copies `seed` into the sections that carry one.
  void PropagateSeed();
  void Validate() const;
};

// Parses YAML. Unknown keys and ill-typed values raise UserError with
// "<name>:<line>: ..." locations. Relative paths are resolved against
// `base_dir`.
RunConfig ParseRunConfig(const std::string& yaml, const std::string& name,
                         const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Fully resolved config as YAML; parsing it back yields the same RunConfig.
std::string EmitRunConfig(const RunConfig& config);

}  // namespace reblur::cli

#endif  // REBLUR_CLI_CONFIG_H_
