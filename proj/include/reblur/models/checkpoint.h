#ifndef REBLUR_MODELS_CHECKPOINT_H_
#define REBLUR_MODELS_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reblur/models/network.h"
#include "reblur/models/tensor.h"

namespace reblur {

// Adam moments for one network, parallel to Network::parameters().
struct AdamState {
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::int64_t step = 0;

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

struct Checkpoint {
  Network deblur;
  Network reblur;
  AdamState deblur_optimizer;
  AdamState reblur_optimizer;
  int epoch = 0;            // completed epochs
  std::int64_t step = 0;    // completed joint steps
  std::uint64_t seed = 0;
};

// Binary layout: the 8-byte magic "RBLRCKPT", a little-endian uint64 header
// length, a YAML header (configs, counters, array table), then every array
// listed in the table as raw little-endian float64 in table order.
void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// As above, but throws std::runtime_error if the stored network configs
// differ from the expected ones.
Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          const DeblurConfig& expected_deblur,
                          const ReblurConfig& expected_reblur);

std::string DescribeConfig(const DeblurConfig& config);
std::string DescribeConfig(const ReblurConfig& config);

}  // namespace reblur

#endif  // REBLUR_MODELS_CHECKPOINT_H_
