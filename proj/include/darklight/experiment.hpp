// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: fit on the train split, score the test split, append
// CSV report rows.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "darklight/classifier.hpp"
#include "darklight/config.hpp"
#include "darklight/pipeline.hpp"
#include "darklight/synthetic.hpp"

namespace darklight {

struct ReportRow {
  std::string config_hash;
  CropMode crop_train = CropMode::maxcenter;
  CropMode crop_test = CropMode::maxcenter;
  FusionMode fusion = FusionMode::concat;
  EnhanceMode enhancement = EnhanceMode::target;
  double top1 = 0.0;
  int k = 3;
  double topk = 0.0;
  /// Only filled when timing was requested; reports stay byte-reproducible otherwise.
  std::optional<double> wall_time_s;
};

struct ExperimentOptions {
  unsigned threads = 1;
  bool record_timing = false;
};

/// Classifier (and gamma regressor, for regressor enhancement) fitted on a train split.
struct TrainedModels {
  PipelineModels models;
  std::vector<double> loss_trace;
};

/// Fits the gamma regressor on darkened training frames labeled with their
/// darkening gamma (regressor mode only; frames_per_clip evenly spaced frames per clip).
GammaRegressor fit_gamma_from_split(const std::vector<LabeledClip>& train, int frames_per_clip);

/// `gamma` is used as-is when given; otherwise fitted from `train` in regressor mode.
TrainedModels train_models(const PipelineConfig& config, const std::vector<LabeledClip>& train,
                           const CropConfig& crop, std::optional<GammaRegressor> gamma = std::nullopt,
                           unsigned threads = 1);

struct Evaluation {
  std::vector<std::vector<double>> scores;
  std::vector<int> labels;
  double top1 = 0.0;
  double topk = 0.0;
};

Evaluation evaluate(const PipelineConfig& config, const PipelineModels& models, const std::vector<LabeledClip>& test,
                    const CropConfig& crop, int k, unsigned threads = 1);

/// One train/evaluate run at the configured crop modes.
ReportRow run_experiment(const PipelineConfig& config, const std::vector<LabeledClip>& train,
                         const std::vector<LabeledClip>& test, const ExperimentOptions& options = {});

/// Sweeps crop_train x crop_test over {center, maxcenter, scale} (sides from
/// default_crop_side); nine rows in train-major order.
std::vector<ReportRow> run_crop_grid(const PipelineConfig& config, const std::vector<LabeledClip>& train,
                                     const std::vector<LabeledClip>& test, const ExperimentOptions& options = {});

void write_report_header(std::ostream& out, int k);
void write_report_row(std::ostream& out, const ReportRow& row);
/// Appends rows, writing the header only when the file is new or empty.
void append_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows);

struct HistogramSummary {
  double mean_luma_before = 0.0;
  double mean_luma_after = 0.0;
  std::array<double, 3> channel_mean_before{};
  std::array<double, 3> channel_mean_after{};
};

/// Writes `image,channel,value,count` rows for both frames (2 x 3 x 256 rows)
/// followed by one `# summary ...` line.
HistogramSummary histogram_report(const Frame& before, const Frame& after, std::ostream& out);
HistogramSummary histogram_report(const Frame& before, const Frame& after, const std::filesystem::path& path);

}  // namespace darklight
