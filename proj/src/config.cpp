// SPDX-License-Identifier: Apache-2.0
#include "darklight/config.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "darklight/error.hpp"
#include "text.hpp"

namespace darklight {

std::string_view to_string(EnhanceMode mode) {
  switch (mode) {
    case EnhanceMode::off:
      return "off";
    case EnhanceMode::target:
      return "target";
    case EnhanceMode::regressor:
      return "regressor";
    case EnhanceMode::fixed:
      return "fixed";
  }
  return "?";
}

EnhanceMode parse_enhance_mode(std::string_view name) {
  if (name == "off") return EnhanceMode::off;
  if (name == "target") return EnhanceMode::target;
  if (name == "regressor") return EnhanceMode::regressor;
  if (name == "fixed") return EnhanceMode::fixed;
  throw PreconditionError("unknown enhancement mode '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  sampling.validate();
  flow.validate();
  for (const auto* crop : {&crop_train, &crop_test}) {
    if (crop->size < 1) throw PreconditionError("config: crop size must be >= 1");
  }
  if (enhancement.mode == EnhanceMode::fixed) static_cast<void>(Gamma(enhancement.gamma));
  if (!(enhancement.target_mean > 0.0 && enhancement.target_mean < kChannelMax)) {
    throw PreconditionError("config: enhance.target_mean must lie in (0, 255)");
  }
  if (enhancement.regressor_frames_per_clip < 1) throw PreconditionError("config: enhance.frames_per_clip must be >= 1");
  if (grid < 1) throw PreconditionError("config: features.grid must be >= 1");
  if (hof_bins < 1) throw PreconditionError("config: features.hof_bins must be >= 1");
  if (!(classifier.learning_rate > 0.0) || classifier.epochs < 0 || !(classifier.l2 >= 0.0)) {
    throw PreconditionError("config: invalid classifier hyperparameters");
  }
  if (eval_topk < 1) throw PreconditionError("config: eval.topk must be >= 1");
}

namespace {

/// One config key: how to print it and how to parse it into a config.
struct Key {
  const char* name;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, std::string_view)> set;
};

std::string fmt(double v) { return text::format_double(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

bool parse_bool(std::string_view s, std::string_view key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw FormatError("invalid boolean for " + std::string(key) + ": '" + std::string(s) + "'");
}

int to_int(std::string_view s, std::string_view key) { return text::parse_int<int>(s, key); }
double to_double(std::string_view s, std::string_view key) { return text::parse_double(s, key); }

const std::vector<Key>& keys() {
  using C = PipelineConfig;
  using S = std::string_view;
  static const std::vector<Key> table = {
      {"seed", [](const C& c) { return std::to_string(c.seed); },
       [](C& c, S v) { c.seed = text::parse_int<std::uint64_t>(v, "seed"); }},
      {"sampling.omega", [](const C& c) { return fmt(c.sampling.omega); },
       [](C& c, S v) { c.sampling.omega = to_int(v, "sampling.omega"); }},
      {"sampling.alpha", [](const C& c) { return fmt(c.sampling.alpha); },
       [](C& c, S v) { c.sampling.alpha = to_int(v, "sampling.alpha"); }},
      {"sampling.beta", [](const C& c) { return fmt(c.sampling.beta); },
       [](C& c, S v) { c.sampling.beta = to_int(v, "sampling.beta"); }},
      {"sampling.sigma", [](const C& c) { return fmt(c.sampling.sigma); },
       [](C& c, S v) { c.sampling.sigma = to_int(v, "sampling.sigma"); }},
      {"crop.train", [](const C& c) { return std::string(to_string(c.crop_train.mode)); },
       [](C& c, S v) { c.crop_train.mode = parse_crop_mode(v); }},
      {"crop.train_size", [](const C& c) { return fmt(c.crop_train.size); },
       [](C& c, S v) { c.crop_train.size = to_int(v, "crop.train_size"); }},
      {"crop.test", [](const C& c) { return std::string(to_string(c.crop_test.mode)); },
       [](C& c, S v) { c.crop_test.mode = parse_crop_mode(v); }},
      {"crop.test_size", [](const C& c) { return fmt(c.crop_test.size); },
       [](C& c, S v) { c.crop_test.size = to_int(v, "crop.test_size"); }},
      {"enhance.mode", [](const C& c) { return std::string(to_string(c.enhancement.mode)); },
       [](C& c, S v) { c.enhancement.mode = parse_enhance_mode(v); }},
      {"enhance.gamma", [](const C& c) { return fmt(c.enhancement.gamma); },
       [](C& c, S v) { c.enhancement.gamma = to_double(v, "enhance.gamma"); }},
      {"enhance.target_mean", [](const C& c) { return fmt(c.enhancement.target_mean); },
       [](C& c, S v) { c.enhancement.target_mean = to_double(v, "enhance.target_mean"); }},
      {"enhance.per_video", [](const C& c) { return fmt(c.enhancement.per_video); },
       [](C& c, S v) { c.enhancement.per_video = parse_bool(v, "enhance.per_video"); }},
      {"enhance.model", [](const C& c) { return c.enhancement.model_path; },
       [](C& c, S v) { c.enhancement.model_path = std::string(v); }},
      {"enhance.frames_per_clip", [](const C& c) { return fmt(c.enhancement.regressor_frames_per_clip); },
       [](C& c, S v) { c.enhancement.regressor_frames_per_clip = to_int(v, "enhance.frames_per_clip"); }},
      {"flow.method", [](const C& c) { return std::string(to_string(c.flow.method)); },
       [](C& c, S v) { c.flow.method = parse_flow_method(v); }},
      {"flow.window", [](const C& c) { return fmt(c.flow.window); },
       [](C& c, S v) { c.flow.window = to_int(v, "flow.window"); }},
      {"flow.hs_alpha", [](const C& c) { return fmt(c.flow.hs_alpha); },
       [](C& c, S v) { c.flow.hs_alpha = to_double(v, "flow.hs_alpha"); }},
      {"flow.hs_iters", [](const C& c) { return fmt(c.flow.hs_iters); },
       [](C& c, S v) { c.flow.hs_iters = to_int(v, "flow.hs_iters"); }},
      {"fusion", [](const C& c) { return std::string(to_string(c.fusion)); },
       [](C& c, S v) { c.fusion = parse_fusion_mode(v); }},
      {"features.grid", [](const C& c) { return fmt(c.grid); },
       [](C& c, S v) { c.grid = to_int(v, "features.grid"); }},
      {"features.hof_bins", [](const C& c) { return fmt(c.hof_bins); },
       [](C& c, S v) { c.hof_bins = to_int(v, "features.hof_bins"); }},
      {"classifier.learning_rate", [](const C& c) { return fmt(c.classifier.learning_rate); },
       [](C& c, S v) { c.classifier.learning_rate = to_double(v, "classifier.learning_rate"); }},
      {"classifier.epochs", [](const C& c) { return fmt(c.classifier.epochs); },
       [](C& c, S v) { c.classifier.epochs = to_int(v, "classifier.epochs"); }},
      {"classifier.l2", [](const C& c) { return fmt(c.classifier.l2); },
       [](C& c, S v) { c.classifier.l2 = to_double(v, "classifier.l2"); }},
      {"eval.softmax", [](const C& c) { return fmt(c.softmax_at_eval); },
       [](C& c, S v) { c.softmax_at_eval = parse_bool(v, "eval.softmax"); }},
      {"eval.topk", [](const C& c) { return fmt(c.eval_topk); },
       [](C& c, S v) { c.eval_topk = to_int(v, "eval.topk"); }},
  };
  return table;
}

}  // namespace

void write_config(const PipelineConfig& config, std::ostream& out) {
  for (const auto& k : keys()) out << k.name << " = " << k.get(config) << '\n';
}

std::string config_to_string(const PipelineConfig& config) {
  std::ostringstream out;
  write_config(config, out);
  return out.str();
}

PipelineConfig parse_config(std::string_view text_in) {
  static const std::map<std::string_view, const Key*> index = [] {
    std::map<std::string_view, const Key*> m;
    for (const auto& k : keys()) m.emplace(k.name, &k);
    return m;
  }();

  PipelineConfig config;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(text_in, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw FormatError(where + ": expected key = value");
    const auto key = std::string(text::trim(line.substr(0, eq)));
    const auto value = text::trim(line.substr(eq + 1));
    const auto it = index.find(key);
    if (it == index.end()) throw FormatError(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw FormatError(where + ": duplicate key '" + key + "'");
    try {
      it->second->set(config, value);
    } catch (const Error& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  try {
    config.validate();
  } catch (const PreconditionError& e) {
    throw FormatError(e.what());
  }
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

void save_config(const PipelineConfig& config, const std::filesystem::path& path) {
  write_file(path, config_to_string(config));
}

std::string config_hash(const PipelineConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(text::fnv1a(config_to_string(config))));
  return buf;
}

}  // namespace darklight
