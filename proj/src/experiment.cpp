// SPDX-License-Identifier: Apache-2.0
#include "darklight/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <ostream>

#include "darklight/error.hpp"
#include "text.hpp"

namespace darklight {

namespace {

std::vector<const Clip*> clip_pointers(const std::vector<LabeledClip>& clips) {
  std::vector<const Clip*> out;
  out.reserve(clips.size());
  for (const auto& c : clips) out.push_back(&c.clip);
  return out;
}

std::vector<int> label_indices(const std::vector<LabeledClip>& clips, const std::vector<std::string>& classes) {
  std::vector<int> out;
  out.reserve(clips.size());
  for (const auto& c : clips) {
    const auto it = std::find(classes.begin(), classes.end(), c.label);
    if (it == classes.end()) throw PreconditionError("label '" + c.label + "' is not a trained class");
    out.push_back(static_cast<int>(it - classes.begin()));
  }
  return out;
}

std::vector<std::string> sorted_labels(const std::vector<LabeledClip>& clips) {
  std::vector<std::string> out;
  for (const auto& c : clips) out.push_back(c.label);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int effective_k(const PipelineConfig& config, std::size_t classes) {
  return std::min<int>(config.eval_topk, static_cast<int>(classes));
}

}  // namespace

GammaRegressor fit_gamma_from_split(const std::vector<LabeledClip>& train, int frames_per_clip) {
  if (frames_per_clip < 1) throw PreconditionError("frames_per_clip must be >= 1");
  std::vector<BrightnessFeatures> features;
  std::vector<Gamma> labels;
  for (const auto& c : train) {
    const Gamma label(c.gamma);
    const std::size_t n = c.clip.size();
    const std::size_t take = std::min<std::size_t>(frames_per_clip, n);
    for (std::size_t j = 0; j < take; ++j) {
      features.push_back(brightness_features(c.clip[j * n / take]));
      labels.push_back(label);
    }
  }
  return fit_gamma_regressor(features, labels);
}

TrainedModels train_models(const PipelineConfig& config, const std::vector<LabeledClip>& train, const CropConfig& crop,
                           std::optional<GammaRegressor> gamma, unsigned threads) {
  config.validate();
  if (train.empty()) throw PreconditionError("empty training split");
  if (config.enhancement.mode == EnhanceMode::regressor && !gamma) {
    gamma = fit_gamma_from_split(train, config.enhancement.regressor_frames_per_clip);
  }
  const auto classes = sorted_labels(train);
  const auto labels = label_indices(train, classes);
  const auto features =
      extract_batch(clip_pointers(train), config, crop, gamma ? &*gamma : nullptr, Split::train, threads);
  auto trained = train_classifier(features, labels, classes, config.classifier);
  return {PipelineModels{std::move(trained.model), std::move(gamma)}, std::move(trained.loss_trace)};
}

Evaluation evaluate(const PipelineConfig& config, const PipelineModels& models, const std::vector<LabeledClip>& test,
                    const CropConfig& crop, int k, unsigned threads) {
  Evaluation ev;
  ev.labels = label_indices(test, models.classifier.class_names);
  const auto features =
      extract_batch(clip_pointers(test), config, crop, models.gamma ? &*models.gamma : nullptr, Split::test, threads);
  ev.scores.reserve(features.size());
  for (const auto& f : features) ev.scores.push_back(predict(models.classifier, f, config.softmax_at_eval));
  ev.top1 = topk_accuracy(ev.scores, ev.labels, 1);
  ev.topk = topk_accuracy(ev.scores, ev.labels, static_cast<std::size_t>(k));
  return ev;
}

ReportRow run_experiment(const PipelineConfig& config, const std::vector<LabeledClip>& train,
                         const std::vector<LabeledClip>& test, const ExperimentOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto trained = train_models(config, train, config.crop_train, std::nullopt, options.threads);
  const int k = effective_k(config, trained.models.classifier.classes);
  const auto ev = evaluate(config, trained.models, test, config.crop_test, k, options.threads);
  ReportRow row{config_hash(config), config.crop_train.mode, config.crop_test.mode, config.fusion,
                config.enhancement.mode, ev.top1, k, ev.topk, std::nullopt};
  if (options.record_timing) {
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

std::vector<ReportRow> run_crop_grid(const PipelineConfig& config, const std::vector<LabeledClip>& train,
                                     const std::vector<LabeledClip>& test, const ExperimentOptions& options) {
  config.validate();
  static constexpr CropMode kModes[] = {CropMode::center, CropMode::maxcenter, CropMode::scale};
  auto crop_for = [](CropMode m) { return CropConfig{m, default_crop_side(m)}; };

  std::optional<GammaRegressor> gamma;
  if (config.enhancement.mode == EnhanceMode::regressor) {
    gamma = fit_gamma_from_split(train, config.enhancement.regressor_frames_per_clip);
  }
  const GammaRegressor* regressor = gamma ? &*gamma : nullptr;

  // Test features depend only on the test crop; extract each mode once.
  std::map<CropMode, std::vector<FeatureVector>> test_features;
  for (auto m : kModes) {
    test_features[m] = extract_batch(clip_pointers(test), config, crop_for(m), regressor, Split::test, options.threads);
  }

  std::vector<ReportRow> rows;
  for (auto train_mode : kModes) {
    const auto start = std::chrono::steady_clock::now();
    auto trained = train_models(config, train, crop_for(train_mode), gamma, options.threads);
    const auto& model = trained.models.classifier;
    const int k = effective_k(config, model.classes);
    const auto labels = label_indices(test, model.class_names);
    const double train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto test_mode : kModes) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<std::vector<double>> scores;
      for (const auto& f : test_features[test_mode]) scores.push_back(predict(model, f, config.softmax_at_eval));
      PipelineConfig cell = config;
      cell.crop_train = crop_for(train_mode);
      cell.crop_test = crop_for(test_mode);
      ReportRow row{config_hash(cell), train_mode, test_mode, config.fusion, config.enhancement.mode,
                    topk_accuracy(scores, labels, 1), k, topk_accuracy(scores, labels, static_cast<std::size_t>(k)),
                    std::nullopt};
      if (options.record_timing) {
        row.wall_time_s = train_seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_report_header(std::ostream& out, int k) {
  out << "config_hash,crop_train,crop_test,fusion,enhancement,top1,top" << k << ",wall_time_s\n";
}

void write_report_row(std::ostream& out, const ReportRow& row) {
  out << row.config_hash << ',' << to_string(row.crop_train) << ',' << to_string(row.crop_test) << ','
      << to_string(row.fusion) << ',' << to_string(row.enhancement) << ',' << text::format_double(row.top1) << ','
      << text::format_double(row.topk) << ',' << (row.wall_time_s ? text::format_double(*row.wall_time_s) : "-")
      << '\n';
}

void append_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
  if (rows.empty()) return;
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot write " + path.string());
  if (fresh) write_report_header(out, rows.front().k);
  for (const auto& r : rows) write_report_row(out, r);
}

HistogramSummary histogram_report(const Frame& before, const Frame& after, std::ostream& out) {
  if (before.width() != after.width() || before.height() != after.height()) {
    throw PreconditionError("histogram_report: frames differ in dimensions");
  }
  static constexpr char kNames[3] = {'R', 'G', 'B'};
  HistogramSummary s;
  out << "image,channel,value,count\n";
  const std::pair<const char*, const Frame*> images[] = {{"before", &before}, {"after", &after}};
  for (const auto& [name, frame] : images) {
    const auto h = histogram(*frame);
    for (int c = 0; c < 3; ++c) {
      for (int v = 0; v < 256; ++v) out << name << ',' << kNames[c] << ',' << v << ',' << h.bins[c][v] << '\n';
    }
  }
  auto channel_means = [](const Frame& f) {
    std::array<double, 3> m{};
    auto px = f.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) m[i % 3] += px[i];
    for (auto& v : m) v /= static_cast<double>(f.pixel_count());
    return m;
  };
  s.mean_luma_before = mean_luma(before);
  s.mean_luma_after = mean_luma(after);
  s.channel_mean_before = channel_means(before);
  s.channel_mean_after = channel_means(after);
  out << "# summary mean_luma_before=" << text::format_double(s.mean_luma_before)
      << " mean_luma_after=" << text::format_double(s.mean_luma_after);
  for (int c = 0; c < 3; ++c) {
    out << " mean_" << kNames[c] << "_before=" << text::format_double(s.channel_mean_before[c]) << " mean_"
        << kNames[c] << "_after=" << text::format_double(s.channel_mean_after[c]);
  }
  out << '\n';
  return s;
}

HistogramSummary histogram_report(const Frame& before, const Frame& after, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return histogram_report(before, after, out);
}

}  // namespace darklight
