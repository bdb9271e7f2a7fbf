#include "reblur/models/checkpoint.h"

#include <yaml-cpp/yaml.h>

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "reblur/data/atomic_file.h"

namespace reblur {
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'R', 'B', 'L', 'R', 'C', 'K', 'P', 'T'};
constexpr char kFormat[] = "reblur-checkpoint/1";

struct ArrayRef {
  std::string name;
  const Tensor* tensor;
};

void EmitDeblur(YAML::Emitter& em, const DeblurConfig& c) {
  em << YAML::BeginMap;
  em << YAML::Key << "base_channels" << YAML::Value << c.base_channels;
  em << YAML::Key << "mid_channels" << YAML::Value << YAML::Flow << YAML::BeginSeq
     << c.mid_channels[0] << c.mid_channels[1] << YAML::EndSeq;
  em << YAML::Key << "num_resblocks" << YAML::Value << c.num_resblocks;
  em << YAML::Key << "conv_kernel_outer" << YAML::Value << c.conv_kernel_outer;
  em << YAML::Key << "conv_kernel_inner" << YAML::Value << c.conv_kernel_inner;
  em << YAML::EndMap;
}

void EmitReblur(YAML::Emitter& em, const ReblurConfig& c) {
  em << YAML::BeginMap;
  em << YAML::Key << "channels" << YAML::Value << c.channels;
  em << YAML::Key << "num_resblocks" << YAML::Value << c.num_resblocks;
  em << YAML::Key << "conv_kernel" << YAML::Value << c.conv_kernel;
  em << YAML::EndMap;
}

DeblurConfig ParseDeblur(const YAML::Node& n) {
  DeblurConfig c;
  c.base_channels = n["base_channels"].as<int>();
  c.mid_channels = {n["mid_channels"][0].as<int>(), n["mid_channels"][1].as<int>()};
  c.num_resblocks = n["num_resblocks"].as<int>();
  c.conv_kernel_outer = n["conv_kernel_outer"].as<int>();
  c.conv_kernel_inner = n["conv_kernel_inner"].as<int>();
  return c;
}

ReblurConfig ParseReblur(const YAML::Node& n) {
  ReblurConfig c;
  c.channels = n["channels"].as<int>();
  c.num_resblocks = n["num_resblocks"].as<int>();
  c.conv_kernel = n["conv_kernel"].as<int>();
  return c;
}

void CollectNetwork(const std::string& prefix, const Network& net,
                    const AdamState& opt, std::vector<ArrayRef>* out) {
  const auto& params = net.parameters();
  for (const NamedParameter& p : params) {
    out->push_back({prefix + "/" + p.name, &p.var.value()});
  }
  for (std::size_t i = 0; i < opt.first_moment.size(); ++i) {
    out->push_back({prefix + ".adam_m/" + params.at(i).name, &opt.first_moment[i]});
  }
  for (std::size_t i = 0; i < opt.second_moment.size(); ++i) {
    out->push_back({prefix + ".adam_v/" + params.at(i).name, &opt.second_moment[i]});
  }
}

Tensor ReadArray(std::istream& in, const Tensor::Shape& shape,
                 const std::string& name) {
  Tensor t(shape);
  in.read(reinterpret_cast<char*>(t.data()),
          static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint truncated while reading " + name);
  return t;
}

}  // namespace

std::string DescribeConfig(const DeblurConfig& c) {
  YAML::Emitter em;
  em << YAML::Flow;
  EmitDeblur(em, c);
  return em.c_str();
}

std::string DescribeConfig(const ReblurConfig& c) {
  YAML::Emitter em;
  em << YAML::Flow;
  EmitReblur(em, c);
  return em.c_str();
}

void SaveCheckpoint(const fs::path& path, const Checkpoint& ckpt) {
  std::vector<ArrayRef> arrays;
  CollectNetwork("deblur", ckpt.deblur, ckpt.deblur_optimizer, &arrays);
  CollectNetwork("reblur", ckpt.reblur, ckpt.reblur_optimizer, &arrays);

  YAML::Emitter em;
  em << YAML::BeginMap;
  em << YAML::Key << "format" << YAML::Value << kFormat;
  em << YAML::Key << "epoch" << YAML::Value << ckpt.epoch;
  em << YAML::Key << "step" << YAML::Value << ckpt.step;
  em << YAML::Key << "seed" << YAML::Value << ckpt.seed;
  em << YAML::Key << "deblur" << YAML::Value;
  EmitDeblur(em, ckpt.deblur.deblur_config());
  em << YAML::Key << "reblur" << YAML::Value;
  EmitReblur(em, ckpt.reblur.reblur_config());
  em << YAML::Key << "deblur_optimizer_step" << YAML::Value << ckpt.deblur_optimizer.step;
  em << YAML::Key << "reblur_optimizer_step" << YAML::Value << ckpt.reblur_optimizer.step;
  em << YAML::Key << "arrays" << YAML::Value << YAML::BeginSeq;
  for (const ArrayRef& a : arrays) {
    const Tensor::Shape& s = a.tensor->shape();
    em << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << a.name
       << YAML::Key << "shape" << YAML::Value << YAML::Flow << YAML::BeginSeq
       << s[0] << s[1] << s[2] << s[3] << YAML::EndSeq << YAML::EndMap;
  }
  em << YAML::EndSeq << YAML::EndMap;
  const std::string header = std::string(em.c_str()) + "\n";

  AtomicWrite(path, [&](const fs::path& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(kMagic, sizeof(kMagic));
    const std::uint64_t len = header.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const ArrayRef& a : arrays) {
      out.write(reinterpret_cast<const char*>(a.tensor->data()),
                static_cast<std::streamsize>(a.tensor->size() * sizeof(double)));
    }
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  });
}

Checkpoint LoadCheckpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[8];
  std::uint64_t len = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || !std::equal(magic, magic + 8, kMagic) || len > (1u << 26)) {
    throw std::runtime_error(path.string() + " is not a checkpoint file");
  }
  std::string header(len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error(path.string() + ": truncated header");
  const YAML::Node root = YAML::Load(header);
  if (root["format"].as<std::string>("") != kFormat) {
    throw std::runtime_error(path.string() + ": unsupported checkpoint format");
  }

  Checkpoint ckpt{BuildDeblur(ParseDeblur(root["deblur"])),
                  BuildReblur(ParseReblur(root["reblur"])), {}, {}};
  ckpt.epoch = root["epoch"].as<int>();
  ckpt.step = root["step"].as<std::int64_t>();
  ckpt.seed = root["seed"].as<std::uint64_t>();
  ckpt.deblur_optimizer.step = root["deblur_optimizer_step"].as<std::int64_t>();
  ckpt.reblur_optimizer.step = root["reblur_optimizer_step"].as<std::int64_t>();

  auto find_param = [](Network& net, const std::string& name) -> std::size_t {
    auto& params = net.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].name == name) return i;
    }
    throw std::runtime_error("checkpoint array " + name +
                             " does not match the stored network config");
  };

  std::size_t loaded_params = 0;
  for (const YAML::Node& entry : root["arrays"]) {
    const std::string name = entry["name"].as<std::string>();
    const Tensor::Shape shape{entry["shape"][0].as<int>(), entry["shape"][1].as<int>(),
                              entry["shape"][2].as<int>(), entry["shape"][3].as<int>()};
    Tensor t = ReadArray(in, shape, name);
    const auto slash = name.find('/');
    const std::string group = name.substr(0, slash);
    const std::string pname = name.substr(slash + 1);
    const bool is_deblur = group.rfind("deblur", 0) == 0;
    Network& net = is_deblur ? ckpt.deblur : ckpt.reblur;
    AdamState& opt = is_deblur ? ckpt.deblur_optimizer : ckpt.reblur_optimizer;
    const std::size_t idx = find_param(net, pname);
    if (net.parameters()[idx].var.value().shape() != shape) {
      throw std::runtime_error("checkpoint array " + name + " has shape " +
                               t.ShapeString() + ", network expects " +
                               net.parameters()[idx].var.value().ShapeString());
    }
    std::vector<Tensor>* moments = nullptr;
    if (group.ends_with(".adam_m")) {
      moments = &opt.first_moment;
    } else if (group.ends_with(".adam_v")) {
      moments = &opt.second_moment;
    }
    if (moments) {
      if (moments->size() != idx) {
        throw std::runtime_error("checkpoint optimizer arrays out of order at " + name);
      }
      moments->push_back(std::move(t));
    } else {
      net.parameters()[idx].var.mutable_value() = std::move(t);
      ++loaded_params;
    }
  }
  if (loaded_params != ckpt.deblur.parameters().size() + ckpt.reblur.parameters().size()) {
    throw std::runtime_error(path.string() + ": missing parameter arrays");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error(path.string() + ": trailing bytes after arrays");
  }
  return ckpt;
}

Checkpoint LoadCheckpoint(const fs::path& path, const DeblurConfig& expected_deblur,
                          const ReblurConfig& expected_reblur) {
  Checkpoint ckpt = LoadCheckpoint(path);
  if (!(ckpt.deblur.deblur_config() == expected_deblur)) {
    throw std::runtime_error("checkpoint " + path.string() + " holds deblur config " +
                             DescribeConfig(ckpt.deblur.deblur_config()) +
                             ", expected " + DescribeConfig(expected_deblur));
  }
  if (!(ckpt.reblur.reblur_config() == expected_reblur)) {
    throw std::runtime_error("checkpoint " + path.string() + " holds reblur config " +
                             DescribeConfig(ckpt.reblur.reblur_config()) +
                             ", expected " + DescribeConfig(expected_reblur));
  }
  return ckpt;
}

}  // namespace reblur
