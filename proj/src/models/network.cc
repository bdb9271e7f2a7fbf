#include "reblur/models/network.h"

#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>

#include "reblur/data/random.h"

namespace reblur {

void DeblurConfig::Validate() const {
  if (base_channels < 1 || mid_channels[0] < 1 || mid_channels[1] < 1) {
    throw std::invalid_argument("DeblurConfig: channel counts must be positive");
  }
  if (num_resblocks < 1) {
    throw std::invalid_argument("DeblurConfig: num_resblocks must be >= 1");
  }
  if (conv_kernel_outer < 1 || conv_kernel_outer % 2 == 0 ||
      conv_kernel_inner < 1 || conv_kernel_inner % 2 == 0) {
    throw std::invalid_argument("DeblurConfig: kernel sizes must be odd");
  }
}

void ReblurConfig::Validate() const {
  if (channels < 1) throw std::invalid_argument("ReblurConfig: channels must be positive");
  if (num_resblocks < 0) {
    throw std::invalid_argument("ReblurConfig: num_resblocks must be >= 0");
  }
  if (conv_kernel < 1 || conv_kernel % 2 == 0) {
    throw std::invalid_argument("ReblurConfig: conv_kernel must be odd");
  }
}

namespace {

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t NameHash(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Network::Network(Config config, std::uint64_t seed) : config_(std::move(config)) {
  // Seeds follow layer names, so layers shared by two depths start equal.
  auto add = [&](const std::string& name, int in, int out, int k, bool zero) {
    Conv conv;
    AddConv(name, in, out, k, StreamSeed(seed, NameHash(name)), zero, &conv);
    convs_.push_back(conv);
  };
  if (const auto* d = std::get_if<DeblurConfig>(&config_)) {
    d->Validate();
    const int c0 = d->base_channels;
    const int c1 = d->mid_channels[0];
    const int c2 = d->mid_channels[1];
    const int ko = d->conv_kernel_outer;
    const int ki = d->conv_kernel_inner;
    add("in_conv", 3, c0, ko, false);
    add("down1", c0, c1, ki, false);
    add("down2", c1, c2, ki, false);
    for (int i = 0; i < d->num_resblocks; ++i) {
      add("res" + std::to_string(i) + ".conv1", c2, c2, ki, false);
      add("res" + std::to_string(i) + ".conv2", c2, c2, ki, true);
    }
    add("up1", c2, c1, ki, false);
    add("up2", c1, c0, ki, false);
    add("out_conv", c0, 3, ko, true);
  } else {
    const auto& r = std::get<ReblurConfig>(config_);
    r.Validate();
    add("head", 3, r.channels, r.conv_kernel, false);
    for (int i = 0; i < r.num_resblocks; ++i) {
      add("res" + std::to_string(i) + ".conv1", r.channels, r.channels,
          r.conv_kernel, false);
      add("res" + std::to_string(i) + ".conv2", r.channels, r.channels,
          r.conv_kernel, true);
    }
    add("tail", r.channels, 3, r.conv_kernel, true);
  }
}

Network::Network(const Network& other)
    : config_(other.config_), convs_(other.convs_) {
  params_.reserve(other.params_.size());
  for (const NamedParameter& p : other.params_) {
    params_.push_back({p.name, Var::Leaf(p.var.value(), p.var.requires_grad())});
  }
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Network::AddConv(const std::string& name, int in, int out, int k,
                      std::uint64_t seed, bool zero_init, Conv* conv) {
  Tensor weight({out, in, k, k});
  if (!zero_init) {
    std::mt19937_64 gen(seed);
    const double bound = std::sqrt(6.0 / (static_cast<double>(in) * k * k));
    for (double& v : weight.values()) v = UniformDouble(gen, -bound, bound);
  }
  conv->weight = params_.size();
  params_.push_back({name + ".weight", Parameter(std::move(weight))});
  conv->bias = params_.size();
  params_.push_back({name + ".bias", Parameter(Tensor({out, 1, 1, 1}))});
}

Topology Network::topology() const {
  return std::holds_alternative<DeblurConfig>(config_) ? Topology::kDeblurUNet
                                                       : Topology::kReblurResNet;
}

Var Network::ApplyConv(const Var& x, const Conv& conv, int stride,
                       ParamMode mode) const {
  const Var& w = params_[conv.weight].var;
  const Var& b = params_[conv.bias].var;
  if (mode == ParamMode::kFrozen) return Conv2d(x, Detach(w), Detach(b), stride);
  return Conv2d(x, w, b, stride);
}

Var Network::ResBlock(const Var& x, const Conv& a, const Conv& b,
                      ParamMode mode) const {
  return Add(x, ApplyConv(Relu(ApplyConv(x, a, 1, mode)), b, 1, mode));
}

Var Network::Forward(const Var& x, ParamMode mode) const {
  const Tensor::Shape& s = x.shape();
  if (s[1] != 3) {
    throw std::invalid_argument("Network::Forward: expected 3 input channels, got " +
                                std::to_string(s[1]));
  }
  if (const auto* d = std::get_if<DeblurConfig>(&config_)) {
    if (s[2] % 4 != 0 || s[3] % 4 != 0) {
      throw std::invalid_argument(
          "deblur module needs height and width divisible by 4, got " +
          std::to_string(s[2]) + "x" + std::to_string(s[3]));
    }
    std::size_t i = 0;
    const Var e1 = Relu(ApplyConv(x, convs_[i++], 1, mode));
    const Var e2 = Relu(ApplyConv(e1, convs_[i++], 2, mode));
    Var h = Relu(ApplyConv(e2, convs_[i++], 2, mode));
    for (int r = 0; r < d->num_resblocks; ++r, i += 2) {
      h = ResBlock(h, convs_[i], convs_[i + 1], mode);
    }
    const Var d2 = Add(Relu(ApplyConv(Upsample2x(h), convs_[i++], 1, mode)), e2);
    const Var d1 = Add(Relu(ApplyConv(Upsample2x(d2), convs_[i++], 1, mode)), e1);
    return Add(ApplyConv(d1, convs_[i], 1, mode), x);
  }
  const auto& r = std::get<ReblurConfig>(config_);
  if (s[2] < 2 || s[3] < 2) {
    throw std::invalid_argument("reblur module needs at least 2x2 input");
  }
  std::size_t i = 0;
  Var h = Relu(ApplyConv(x, convs_[i++], 1, mode));
  for (int b = 0; b < r.num_resblocks; ++b, i += 2) {
    h = ResBlock(h, convs_[i], convs_[i + 1], mode);
  }
  return Add(ApplyConv(h, convs_[i], 1, mode), x);
}

Tensor Network::Evaluate(const Tensor& x) const {
  return Forward(Constant(x), ParamMode::kFrozen).value();
}

ImageTensor Network::Evaluate(const ImageTensor& image) const {
  return TensorToImage(Evaluate(ImageToTensor(image)));
}

const Var& Network::parameter(const std::string& name) const {
  for (const NamedParameter& p : params_) {
    if (p.name == name) return p.var;
  }
  throw std::out_of_range("no parameter named " + name);
}

std::size_t Network::ParameterCount() const {
  std::size_t n = 0;
  for (const NamedParameter& p : params_) n += p.var.value().size();
  return n;
}

std::uint64_t Network::ParameterDigest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const NamedParameter& p : params_) {
    const Tensor& t = p.var.value();
    const auto* bytes = reinterpret_cast<const unsigned char*>(t.data());
    for (std::size_t i = 0; i < t.size() * sizeof(double); ++i) {
      h = (h ^ bytes[i]) * 0x100000001b3ULL;
    }
  }
  return h;
}

void Network::ZeroGrad() {
  for (NamedParameter& p : params_) p.var.ZeroGrad();
}

void Network::SetRequiresGrad(bool on) {
  for (NamedParameter& p : params_) p.var.set_requires_grad(on);
}

Network BuildDeblur(const DeblurConfig& config, std::uint64_t seed) {
  return Network(config, seed);
}

Network BuildReblur(const ReblurConfig& config, std::uint64_t seed) {
  return Network(config, seed);
}

}  // namespace reblur
