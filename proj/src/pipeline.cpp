// SPDX-License-Identifier: Apache-2.0
#include "darklight/pipeline.hpp"

#include "darklight/error.hpp"
#include "darklight/geometry.hpp"
#include "darklight/optflow.hpp"
#include "darklight/parallel.hpp"

namespace darklight {

std::uint64_t clip_stream_seed(std::uint64_t master, Split split, std::size_t index) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(split)), index);
}

std::string pipeline_schema(const PipelineConfig& config) {
  const auto app = appearance_schema(config.grid);
  const auto fused = config.fusion == FusionMode::concat ? "fused-concat:" + app : "fused-min:" + app;
  return fused + "+" + hof_schema(config.grid, config.hof_bins);
}

PipelineStages run_stages(const Clip& clip, const PipelineConfig& config, const StageOptions& options) {
  PipelineStages st;
  Rng rng(options.stream_seed);
  auto sampled = delta_sample(clip, config.sampling, rng);
  st.plan = std::move(sampled.plan);
  const Clip cropped = resize_for_mode(sampled.clip, options.crop.mode, options.crop.size);

  GammaEstimator estimator = FixedEstimator{};
  switch (config.enhancement.mode) {
    case EnhanceMode::off:
      break;
    case EnhanceMode::fixed:
      estimator = FixedEstimator{Gamma(config.enhancement.gamma)};
      break;
    case EnhanceMode::target:
      estimator = TargetEstimator{config.enhancement.target_mean};
      break;
    case EnhanceMode::regressor:
      if (options.regressor == nullptr) throw PreconditionError("pipeline: regressor enhancement without a gamma model");
      estimator = RegressorEstimator{options.regressor};
      break;
  }
  auto enhanced = enhance_clip(cropped, estimator, {config.enhancement.per_video, options.threads});
  st.gammas = std::move(enhanced.gammas);

  st.dark = extract_appearance(cropped, config.grid);
  st.light = extract_appearance(enhanced.clip, config.grid);
  st.fused = fuse(st.dark, st.light, config.fusion);

  const auto fields = clip_flow(enhanced.clip, config.flow, options.threads);
  st.motion = extract_hof(fields, config.grid, config.hof_bins);
  st.combined = join(st.fused, st.motion);
  return st;
}

std::vector<double> run_pipeline(const Clip& clip, const PipelineConfig& config, const PipelineModels& models,
                                 std::uint64_t stream_seed, unsigned threads) {
  const GammaRegressor* regressor = models.gamma ? &*models.gamma : nullptr;
  auto st = run_stages(clip, config, {config.crop_test, regressor, stream_seed, threads});
  return predict(models.classifier, st.combined, config.softmax_at_eval);
}

std::vector<FeatureVector> extract_batch(const std::vector<const Clip*>& clips, const PipelineConfig& config,
                                         const CropConfig& crop, const GammaRegressor* regressor, Split split,
                                         unsigned threads) {
  std::vector<FeatureVector> out(clips.size());
  parallel_for(clips.size(), threads, [&](std::size_t i) {
    out[i] = run_stages(*clips[i], config, {crop, regressor, clip_stream_seed(config.seed, split, i), 1}).combined;
  });
  return out;
}

}  // namespace darklight
