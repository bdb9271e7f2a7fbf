#include "reblur/cli/config.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace reblur::cli {
namespace {

using Handler = std::function<void(const YAML::Node&)>;

class Reader {
 public:
  Reader(std::string name, std::filesystem::path base_dir)
      : name_(std::move(name)), base_dir_(std::move(base_dir)) {}

  [[noreturn]] void Fail(const YAML::Node& node, const std::string& msg) const {
    const YAML::Mark mark = node.Mark();
    const std::string where =
        mark.is_null() ? name_ : name_ + ":" + std::to_string(mark.line + 1);
    throw UserError(where + ": " + msg);
  }

  template <typename T>
  T Get(const YAML::Node& node, const std::string& key, const char* type) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      Fail(node, "'" + key + "' expects " + type);
    }
  }

  std::filesystem::path Path(const YAML::Node& node, const std::string& key) const {
    const std::filesystem::path p = Get<std::string>(node, key, "a path");
    return p.empty() || p.is_absolute() ? p : (base_dir_ / p).lexically_normal();
  }

  void Map(const YAML::Node& node, const std::string& section,
           const std::map<std::string, Handler>& fields) const {
    if (node.IsNull()) return;
    if (!node.IsMap()) Fail(node, "'" + section + "' must be a mapping");
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      const auto it = fields.find(key);
      if (it == fields.end()) {
        std::string known;
        for (const auto& [k, _] : fields) known += (known.empty() ? "" : ", ") + k;
        Fail(kv.first, "unknown key '" + key + "' in " + section + " (known: " + known + ")");
      }
      it->second(kv.second);
    }
  }

 private:
  std::string name_;
  std::filesystem::path base_dir_;
};

}  // namespace

void RunConfig::PropagateSeed() {
  data.synth.seed = seed;
  train.seed = seed;
}

void RunConfig::Validate() const {
  data.synth.Validate();
  deblur.Validate();
  reblur.Validate();
  train.Validate();
  tta.Validate();
}

RunConfig ParseRunConfig(const std::string& yaml, const std::string& name,
                         const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw UserError(name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  const Reader r(name, base_dir);
  RunConfig c;
  const auto i = [&](int* out, const char* key) {
    return [&r, out, key](const YAML::Node& n) { *out = r.Get<int>(n, key, "an integer"); };
  };
  const auto d = [&](double* out, const char* key) {
    return [&r, out, key](const YAML::Node& n) { *out = r.Get<double>(n, key, "a number"); };
  };
  const auto z = [&](std::size_t* out, const char* key) {
    return [&r, out, key](const YAML::Node& n) {
      *out = r.Get<std::size_t>(n, key, "a non-negative integer");
    };
  };
  const auto ints = [&](std::vector<int>* out, const char* key) {
    return [&r, out, key](const YAML::Node& n) {
      *out = r.Get<std::vector<int>>(n, key, "a list of integers");
    };
  };

  r.Map(root, "config", {
    {"seed", [&](const YAML::Node& n) {
       c.seed = r.Get<std::uint64_t>(n, "seed", "a non-negative integer");
     }},
    {"data", [&](const YAML::Node& n) {
       r.Map(n, "data", {
         {"source_dir", [&](const YAML::Node& v) { c.data.synth.source_dir = r.Path(v, "source_dir"); }},
         {"dataset_dir", [&](const YAML::Node& v) { c.data.dataset_dir = r.Path(v, "dataset_dir"); }},
         {"patch_size", i(&c.data.synth.patch_size, "patch_size")},
         {"kernel_size", i(&c.data.synth.kernel_size, "kernel_size")},
         {"kernel_length_range", [&](const YAML::Node& v) {
            const auto range = r.Get<std::vector<double>>(v, "kernel_length_range", "[min, max]");
            if (range.size() != 2) r.Fail(v, "'kernel_length_range' expects [min, max]");
            c.data.synth.kernel_length_min = range[0];
            c.data.synth.kernel_length_max = range[1];
          }},
         {"count", z(&c.data.synth.count, "count")},
         {"random_flips", [&](const YAML::Node& v) {
            c.data.synth.random_flips = r.Get<bool>(v, "random_flips", "true or false");
          }},
         {"holdout", z(&c.data.holdout, "holdout")},
         {"generate_sources", z(&c.data.generate_sources, "generate_sources")},
         {"source_size", i(&c.data.source_size, "source_size")},
       });
     }},
    {"deblur", [&](const YAML::Node& n) {
       r.Map(n, "deblur", {
         {"base_channels", i(&c.deblur.base_channels, "base_channels")},
         {"mid_channels", [&](const YAML::Node& v) {
            const auto mid = r.Get<std::vector<int>>(v, "mid_channels", "[c1, c2]");
            if (mid.size() != 2) r.Fail(v, "'mid_channels' expects exactly two values");
            c.deblur.mid_channels = {mid[0], mid[1]};
          }},
         {"num_resblocks", i(&c.deblur.num_resblocks, "num_resblocks")},
         {"conv_kernel_outer", i(&c.deblur.conv_kernel_outer, "conv_kernel_outer")},
         {"conv_kernel_inner", i(&c.deblur.conv_kernel_inner, "conv_kernel_inner")},
       });
     }},
    {"reblur", [&](const YAML::Node& n) {
       r.Map(n, "reblur", {
         {"channels", i(&c.reblur.channels, "channels")},
         {"num_resblocks", i(&c.reblur.num_resblocks, "num_resblocks")},
         {"conv_kernel", i(&c.reblur.conv_kernel, "conv_kernel")},
       });
     }},
    {"train", [&](const YAML::Node& n) {
       r.Map(n, "train", {
         {"epochs", i(&c.train.epochs, "epochs")},
         {"batch_size", i(&c.train.batch_size, "batch_size")},
         {"initial_lr", d(&c.train.initial_lr, "initial_lr")},
         {"milestones", [&](const YAML::Node& v) {
            c.train.milestones = r.Get<std::vector<double>>(v, "milestones", "a list of numbers");
          }},
         {"lambda_reblur", d(&c.train.lambda_reblur, "lambda_reblur")},
         {"mode", [&](const YAML::Node& v) {
            try {
              c.train.mode = ParseTrainMode(r.Get<std::string>(v, "mode", "a string"));
            } catch (const std::invalid_argument& e) {
              r.Fail(v, e.what());
            }
          }},
         {"reblur_objective", [&](const YAML::Node& v) {
            try {
              c.train.reblur_objective =
                  ParseReblurObjective(r.Get<std::string>(v, "reblur_objective", "a string"));
            } catch (const std::invalid_argument& e) {
              r.Fail(v, e.what());
            }
          }},
         {"crop_size", i(&c.train.crop_size, "crop_size")},
         {"checkpoint_every", i(&c.train.checkpoint_every, "checkpoint_every")},
       });
     }},
    {"tta", [&](const YAML::Node& n) {
       r.Map(n, "tta", {
         {"steps", i(&c.tta.steps, "steps")},
         {"lr", d(&c.tta.lr, "lr")},
         {"histogram_bins", i(&c.tta.histogram_bins, "histogram_bins")},
       });
     }},
    {"sweep", [&](const YAML::Node& n) {
       r.Map(n, "sweep", {
         {"capacity_resblocks", ints(&c.sweep.capacity_resblocks, "capacity_resblocks")},
         {"capacity_reblur_resblocks",
          i(&c.sweep.capacity_reblur_resblocks, "capacity_reblur_resblocks")},
         {"reblur_n", ints(&c.sweep.reblur_n, "reblur_n")},
         {"tta_steps", ints(&c.sweep.tta_steps, "tta_steps")},
       });
     }},
  });
  c.PropagateSeed();
  try {
    c.Validate();
  } catch (const std::invalid_argument& e) {
    throw UserError(name + ": " + e.what());
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str(), path.string(),
                        std::filesystem::absolute(path).parent_path());
}

std::string EmitRunConfig(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  const auto flow = [&out](const auto& values) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const auto& v : values) out << v;
    out << YAML::EndSeq;
  };
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "data" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "source_dir" << YAML::Value << c.data.synth.source_dir.string();
  out << YAML::Key << "dataset_dir" << YAML::Value << c.data.dataset_dir.string();
  out << YAML::Key << "patch_size" << YAML::Value << c.data.synth.patch_size;
  out << YAML::Key << "kernel_size" << YAML::Value << c.data.synth.kernel_size;
  out << YAML::Key << "kernel_length_range" << YAML::Value;
  flow(std::vector<double>{c.data.synth.kernel_length_min, c.data.synth.kernel_length_max});
  out << YAML::Key << "count" << YAML::Value << c.data.synth.count;
  out << YAML::Key << "random_flips" << YAML::Value << c.data.synth.random_flips;
  out << YAML::Key << "holdout" << YAML::Value << c.data.holdout;
  out << YAML::Key << "generate_sources" << YAML::Value << c.data.generate_sources;
  out << YAML::Key << "source_size" << YAML::Value << c.data.source_size;
  out << YAML::EndMap;
  out << YAML::Key << "deblur" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "base_channels" << YAML::Value << c.deblur.base_channels;
  out << YAML::Key << "mid_channels" << YAML::Value;
  flow(c.deblur.mid_channels);
  out << YAML::Key << "num_resblocks" << YAML::Value << c.deblur.num_resblocks;
  out << YAML::Key << "conv_kernel_outer" << YAML::Value << c.deblur.conv_kernel_outer;
  out << YAML::Key << "conv_kernel_inner" << YAML::Value << c.deblur.conv_kernel_inner;
  out << YAML::EndMap;
  out << YAML::Key << "reblur" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "channels" << YAML::Value << c.reblur.channels;
  out << YAML::Key << "num_resblocks" << YAML::Value << c.reblur.num_resblocks;
  out << YAML::Key << "conv_kernel" << YAML::Value << c.reblur.conv_kernel;
  out << YAML::EndMap;
  out << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "epochs" << YAML::Value << c.train.epochs;
  out << YAML::Key << "batch_size" << YAML::Value << c.train.batch_size;
  out << YAML::Key << "initial_lr" << YAML::Value << c.train.initial_lr;
  out << YAML::Key << "milestones" << YAML::Value;
  flow(c.train.milestones);
  out << YAML::Key << "lambda_reblur" << YAML::Value << c.train.lambda_reblur;
  out << YAML::Key << "mode" << YAML::Value << ToString(c.train.mode);
  out << YAML::Key << "reblur_objective" << YAML::Value << ToString(c.train.reblur_objective);
  out << YAML::Key << "crop_size" << YAML::Value << c.train.crop_size;
  out << YAML::Key << "checkpoint_every" << YAML::Value << c.train.checkpoint_every;
  out << YAML::EndMap;
  out << YAML::Key << "tta" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "steps" << YAML::Value << c.tta.steps;
  out << YAML::Key << "lr" << YAML::Value << c.tta.lr;
  out << YAML::Key << "histogram_bins" << YAML::Value << c.tta.histogram_bins;
  out << YAML::EndMap;
  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "capacity_resblocks" << YAML::Value;
  flow(c.sweep.capacity_resblocks);
  out << YAML::Key << "capacity_reblur_resblocks" << YAML::Value
      << c.sweep.capacity_reblur_resblocks;
  out << YAML::Key << "reblur_n" << YAML::Value;
  flow(c.sweep.reblur_n);
  out << YAML::Key << "tta_steps" << YAML::Value;
  flow(c.sweep.tta_steps);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace reblur::cli
