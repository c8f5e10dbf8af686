// SPDX-License-Identifier: Apache-2.0
//
// End-to-end clip scoring:
//   delta-sample -> crop -> dark appearance
//                        -> enhance -> light appearance
//   fuse(dark, light) + HOF(flow of the enhanced clip) -> linear head
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "darklight/classifier.hpp"
#include "darklight/config.hpp"
#include "darklight/features.hpp"
#include "darklight/indgic.hpp"
#include "darklight/sampler.hpp"

namespace darklight {

enum class Split : std::uint8_t { train = 0, test = 1 };

/// Independent sampling stream for clip `index` of a split.
std::uint64_t clip_stream_seed(std::uint64_t master, Split split, std::size_t index);

/// Intermediate results of one clip's trip through the pipeline.
struct PipelineStages {
  SamplePlan plan;
  std::vector<Gamma> gammas;
  FeatureVector dark;
  FeatureVector light;
  FeatureVector fused;
  FeatureVector motion;
  FeatureVector combined;
};

struct StageOptions {
  CropConfig crop;
  const GammaRegressor* regressor = nullptr;
  std::uint64_t stream_seed = 0;
  unsigned threads = 1;
};

/// Schema of the classifier input produced under `config`.
std::string pipeline_schema(const PipelineConfig& config);

PipelineStages run_stages(const Clip& clip, const PipelineConfig& config, const StageOptions& options);

struct PipelineModels {
  ClassifierModel classifier;
  std::optional<GammaRegressor> gamma;
};

/// Scores one clip with the test-time crop. Deterministic in (clip, config, models, stream_seed).
std::vector<double> run_pipeline(const Clip& clip, const PipelineConfig& config, const PipelineModels& models,
                                 std::uint64_t stream_seed, unsigned threads = 1);

/// Classifier inputs for a batch of clips; clip i uses clip_stream_seed(config.seed, split, i).
std::vector<FeatureVector> extract_batch(const std::vector<const Clip*>& clips, const PipelineConfig& config,
                                         const CropConfig& crop, const GammaRegressor* regressor, Split split,
                                         unsigned threads = 1);

}  // namespace darklight
