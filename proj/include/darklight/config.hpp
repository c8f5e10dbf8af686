// SPDX-License-Identifier: Apache-2.0
//
// PipelineConfig and its key=value file format: one `key = value` per line,
// `#` starts a comment, unknown or repeated keys are errors, absent keys keep
// their defaults. write_config emits every key, so a written file round-trips
// exactly.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "darklight/classifier.hpp"
#include "darklight/features.hpp"
#include "darklight/geometry.hpp"
#include "darklight/indgic.hpp"
#include "darklight/optflow.hpp"
#include "darklight/sampler.hpp"

namespace darklight {

enum class EnhanceMode { off, target, regressor, fixed };

std::string_view to_string(EnhanceMode mode);
EnhanceMode parse_enhance_mode(std::string_view name);

struct EnhanceConfig {
  EnhanceMode mode = EnhanceMode::target;
  double gamma = 1.0;  ///< fixed mode
  double target_mean = kDefaultTargetMean;
  bool per_video = false;
  /// Gamma regressor file for regressor mode; empty means "fit or load next to the classifier".
  std::string model_path;
  /// Frames per training clip used to fit the regressor.
  int regressor_frames_per_clip = 4;
  bool operator==(const EnhanceConfig&) const = default;
};

struct CropConfig {
  CropMode mode = CropMode::maxcenter;
  int size = kMaxcenterSide;
  bool operator==(const CropConfig&) const = default;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  SamplingParams sampling{4, 0, 2, 6};
  CropConfig crop_train;
  CropConfig crop_test;
  EnhanceConfig enhancement;
  FlowParams flow;
  FusionMode fusion = FusionMode::concat;
  int grid = 4;
  int hof_bins = 8;
  TrainHyper classifier;
  bool softmax_at_eval = false;
  /// Secondary k reported next to top-1.
  int eval_topk = 3;

  void validate() const;
  bool operator==(const PipelineConfig&) const = default;
};

void write_config(const PipelineConfig& config, std::ostream& out);
std::string config_to_string(const PipelineConfig& config);
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const PipelineConfig& config, const std::filesystem::path& path);

/// 16 hex digits identifying a configuration (FNV-1a of its canonical text).
std::string config_hash(const PipelineConfig& config);

}  // namespace darklight
