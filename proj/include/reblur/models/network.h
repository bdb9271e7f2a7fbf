#ifndef REBLUR_MODELS_NETWORK_H_
#define REBLUR_MODELS_NETWORK_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "reblur/data/image.h"
#include "reblur/models/autograd.h"
#include "reblur/models/tensor.h"

namespace reblur {

// Residual U-Net deblurring module. Encoder: outer conv to base_channels,
// two stride-2 inner convs to mid_channels; num_resblocks ResBlocks at 1/4
// resolution; decoder mirrors the encoder with nearest upsampling + conv and
// additive skips; final outer conv to RGB plus a global input residual.
struct DeblurConfig {
  int base_channels = 64;
  std::array<int, 2> mid_channels{128, 192};
  int num_resblocks = 8;
  int conv_kernel_outer = 5;
  int conv_kernel_inner = 3;

  void Validate() const;
  friend bool operator==(const DeblurConfig&, const DeblurConfig&) = default;
};

// Stride-free residual network used as the reblurring module.
struct ReblurConfig {
  int channels = 64;
  int num_resblocks = 2;
  int conv_kernel = 5;

  void Validate() const;
  friend bool operator==(const ReblurConfig&, const ReblurConfig&) = default;
};

enum class Topology { kDeblurUNet, kReblurResNet };

// kFrozen evaluates with the parameter values as constants, so the result
// carries no gradient path into this network's parameters.
enum class ParamMode { kTrainable, kFrozen };

struct NamedParameter {
  std::string name;
  Var var;
};

class Network {
 public:
  using Config = std::variant<DeblurConfig, ReblurConfig>;

  // Hidden layers are drawn uniformly in +-sqrt(3/fan_in) from `seed`; the
  // last conv is zero so a fresh network is the identity map.
  Network(Config config, std::uint64_t seed);

  // Parameters are deep-copied.
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  Topology topology() const;
  const Config& config() const { return config_; }
  const DeblurConfig& deblur_config() const { return std::get<DeblurConfig>(config_); }
  const ReblurConfig& reblur_config() const { return std::get<ReblurConfig>(config_); }

  // x: (N,3,H,W). The U-Net needs H and W divisible by 4.
  Var Forward(const Var& x, ParamMode mode = ParamMode::kTrainable) const;
  Tensor Evaluate(const Tensor& x) const;
  ImageTensor Evaluate(const ImageTensor& image) const;

  std::vector<NamedParameter>& parameters() { return params_; }
  const std::vector<NamedParameter>& parameters() const { return params_; }
  const Var& parameter(const std::string& name) const;

  std::size_t ParameterCount() const;
  // FNV-1a over the raw bytes of every parameter, in order.
  std::uint64_t ParameterDigest() const;

  void ZeroGrad();
  void SetRequiresGrad(bool on);

 private:
  struct Conv {
    std::size_t weight;  // indices into params_
    std::size_t bias;
  };

  void AddConv(const std::string& name, int in, int out, int k,
               std::uint64_t seed, bool zero_init, Conv* conv);
  Var ApplyConv(const Var& x, const Conv& conv, int stride, ParamMode mode) const;
  Var ResBlock(const Var& x, const Conv& a, const Conv& b, ParamMode mode) const;

  Config config_;
  std::vector<NamedParameter> params_;
  std::vector<Conv> convs_;  // topology-specific order, see network.cc
};

Network BuildDeblur(const DeblurConfig& config, std::uint64_t seed = 0);
Network BuildReblur(const ReblurConfig& config, std::uint64_t seed = 0);

}  // namespace reblur

#endif  // REBLUR_MODELS_NETWORK_H_
