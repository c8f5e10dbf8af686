// SPDX-License-Identifier: Apache-2.0
#include "darklight/indgic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "darklight/error.hpp"
#include "darklight/parallel.hpp"
#include "linalg.hpp"
#include "text.hpp"

namespace darklight {

namespace {

using Lut = std::array<std::uint8_t, 256>;

Lut power_lut(double exponent) {
  Lut lut{};
  for (int p = 0; p < 256; ++p) lut[p] = to_channel(kChannelMax * std::pow(p / kChannelMax, exponent));
  return lut;
}

Frame map_pixels(const Frame& frame, const Lut& lut) {
  std::vector<std::uint8_t> out(frame.pixels().begin(), frame.pixels().end());
  for (auto& v : out) v = lut[v];
  return Frame(frame.width(), frame.height(), std::move(out));
}

void merge(HistogramRGB& into, const HistogramRGB& from) {
  for (int c = 0; c < 3; ++c) {
    for (int v = 0; v < 256; ++v) into.bins[c][v] += from.bins[c][v];
  }
}

constexpr int kBisectionIterations = 30;

}  // namespace

Gamma::Gamma(double value) : value_(value) {
  if (!(value >= kGammaMin && value <= kGammaMax)) {
    throw PreconditionError("gamma " + text::format_double(value) + " outside [1, 10]");
  }
}

Gamma Gamma::clamped(double value) {
  if (std::isnan(value)) return Gamma(kGammaMin, Unchecked{});
  return Gamma(std::clamp(value, kGammaMin, kGammaMax), Unchecked{});
}

Frame apply_gamma(const Frame& frame, Gamma gamma) {
  if (gamma.value() == 1.0) return frame;
  return map_pixels(frame, power_lut(1.0 / gamma.value()));
}

Frame darken(const Frame& frame, Gamma gamma) {
  if (gamma.value() == 1.0) return frame;
  return map_pixels(frame, power_lut(gamma.value()));
}

double mean_enhanced_intensity(const HistogramRGB& hist, Gamma gamma) {
  const double exponent = 1.0 / gamma.value();
  double sum = 0.0;
  std::uint64_t count = 0;
  for (int v = 0; v < 256; ++v) {
    const std::uint64_t n = hist.bins[0][v] + hist.bins[1][v] + hist.bins[2][v];
    if (n == 0) continue;
    sum += static_cast<double>(n) * kChannelMax * std::pow(v / kChannelMax, exponent);
    count += n;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double mean_enhanced_intensity(const Frame& frame, Gamma gamma) {
  return mean_enhanced_intensity(histogram(frame), gamma);
}

GammaEstimate estimate_gamma_target(const HistogramRGB& hist, double target_mean) {
  if (!(target_mean > 0.0 && target_mean < kChannelMax)) {
    throw PreconditionError("target mean must lie in (0, 255)");
  }
  std::uint64_t total = 0;
  std::uint64_t zeros = 0;
  for (int c = 0; c < 3; ++c) {
    zeros += hist.bins[c][0];
    for (auto n : hist.bins[c]) total += n;
  }
  if (total == zeros) return {Gamma(kGammaMax), true};

  auto mean_at = [&](double g) { return mean_enhanced_intensity(hist, Gamma(g)); };
  if (mean_at(kGammaMin) >= target_mean) return {Gamma(kGammaMin), false};
  if (mean_at(kGammaMax) <= target_mean) return {Gamma(kGammaMax), false};

  double lo = kGammaMin;
  double hi = kGammaMax;
  for (int i = 0; i < kBisectionIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mean_at(mid) < target_mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {Gamma(0.5 * (lo + hi)), false};
}

GammaEstimate estimate_gamma_target(const Frame& frame, double target_mean) {
  return estimate_gamma_target(histogram(frame), target_mean);
}

// ---------------------------------------------------------------------------
// Brightness features and the regressor

const std::array<std::string, kBrightnessFeatureCount>& brightness_feature_names() {
  static const std::array<std::string, kBrightnessFeatureCount> names = {
      "luma_mean", "luma_std", "luma_p05",     "luma_p25",       "luma_p50",
      "luma_p75",  "luma_p95", "red_mean",     "green_mean",     "blue_mean",
      "frac_dark", "frac_bright", "log1p_luma_mean"};
  return names;
}

BrightnessFeatures brightness_features(const Frame& frame) {
  Plane y = luma(frame);
  const auto n = static_cast<double>(y.values.size());

  double sum = 0.0;
  double dark = 0.0;
  double bright = 0.0;
  for (double v : y.values) {
    sum += v;
    dark += v < 26.0 ? 1.0 : 0.0;
    bright += v > 229.0 ? 1.0 : 0.0;
  }
  const double mean = sum / n;
  double var = 0.0;
  for (double v : y.values) var += (v - mean) * (v - mean);
  var /= n;

  std::sort(y.values.begin(), y.values.end());
  auto percentile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, y.values.size() - 1);
    const double t = pos - static_cast<double>(i);
    return ((1.0 - t) * y.values[i] + t * y.values[j]) / kChannelMax;
  };

  std::array<double, 3> channel{};
  auto px = frame.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) channel[i % 3] += px[i];

  return {mean / kChannelMax,
          std::sqrt(var) / kChannelMax,
          percentile(0.05),
          percentile(0.25),
          percentile(0.50),
          percentile(0.75),
          percentile(0.95),
          channel[0] / n / kChannelMax,
          channel[1] / n / kChannelMax,
          channel[2] / n / kChannelMax,
          dark / n,
          bright / n,
          std::log1p(mean)};
}

GammaRegressor fit_gamma_regressor(const std::vector<BrightnessFeatures>& features,
                                   const std::vector<Gamma>& labels) {
  constexpr std::size_t d = kBrightnessFeatureCount;
  if (features.size() != labels.size()) throw PreconditionError("feature/label count mismatch");
  if (features.size() < d + 1) throw PreconditionError("insufficient training data: need at least 14 pairs");
  const auto n = static_cast<double>(features.size());

  // Solve on standardized features, then fold the scaling back into raw weights.
  std::array<double, d> mean{};
  std::array<double, d> scale{};
  for (const auto& f : features) {
    for (std::size_t k = 0; k < d; ++k) mean[k] += f[k] / n;
  }
  for (const auto& f : features) {
    for (std::size_t k = 0; k < d; ++k) scale[k] += (f[k] - mean[k]) * (f[k] - mean[k]) / n;
  }
  for (auto& s : scale) s = s > 1e-24 ? std::sqrt(s) : 1.0;

  double target_mean = 0.0;
  for (const auto& g : labels) target_mean += std::log(g.value()) / n;

  std::vector<double> normal(d * d, 0.0);
  std::vector<double> rhs(d, 0.0);
  std::array<double, d> z{};
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) z[k] = (features[i][k] - mean[k]) / scale[k];
    const double t = std::log(labels[i].value()) - target_mean;
    for (std::size_t r = 0; r < d; ++r) {
      rhs[r] += z[r] * t;
      for (std::size_t c = 0; c < d; ++c) normal[r * d + c] += z[r] * z[c];
    }
  }
  for (std::size_t k = 0; k < d; ++k) normal[k * d + k] += kGammaRidge * n;

  std::vector<double> w;
  try {
    w = linalg::solve(std::move(normal), std::move(rhs));
  } catch (const NumericError&) {
    throw NumericError("gamma regressor: singular normal equations after ridge");
  }

  GammaRegressor model;
  model.bias = target_mean;
  for (std::size_t k = 0; k < d; ++k) {
    model.weights[k] = w[k] / scale[k];
    model.bias -= model.weights[k] * mean[k];
  }
  model.trained_on = features.size();
  return model;
}

GammaRegressor fit_gamma_regressor(const std::vector<std::pair<Frame, Gamma>>& training_pairs) {
  std::vector<BrightnessFeatures> features;
  std::vector<Gamma> labels;
  features.reserve(training_pairs.size());
  labels.reserve(training_pairs.size());
  for (const auto& [frame, gamma] : training_pairs) {
    features.push_back(brightness_features(frame));
    labels.push_back(gamma);
  }
  return fit_gamma_regressor(features, labels);
}

Gamma predict_gamma(const GammaRegressor& model, const BrightnessFeatures& features) {
  double s = model.bias;
  for (std::size_t k = 0; k < kBrightnessFeatureCount; ++k) s += model.weights[k] * features[k];
  return Gamma::clamped(std::exp(s));
}

Gamma predict_gamma(const GammaRegressor& model, const Frame& frame) {
  return predict_gamma(model, brightness_features(frame));
}

void write_gamma_regressor(const GammaRegressor& model, std::ostream& out) {
  out << "schema," << kBrightnessSchema << ",trained_on," << model.trained_on << '\n';
  const auto& names = brightness_feature_names();
  for (std::size_t k = 0; k < kBrightnessFeatureCount; ++k) {
    out << names[k] << ',' << text::format_double(model.weights[k]) << '\n';
  }
  out << "bias," << text::format_double(model.bias) << '\n';
}

GammaRegressor read_gamma_regressor(std::istream& in) {
  std::string line;
  auto next_fields = [&](const char* what) {
    if (!std::getline(in, line)) throw FormatError(std::string("gamma model: missing ") + what);
    return text::split(text::trim(line), ',');
  };
  auto header = next_fields("header");
  if (header.size() != 4 || header[0] != "schema" || header[2] != "trained_on") {
    throw FormatError("gamma model: malformed header");
  }
  if (header[1] != kBrightnessSchema) throw FormatError("gamma model: unsupported schema '" + header[1] + "'");
  GammaRegressor model;
  model.trained_on = text::parse_int<std::size_t>(header[3], "trained_on");
  const auto& names = brightness_feature_names();
  for (std::size_t k = 0; k < kBrightnessFeatureCount; ++k) {
    auto f = next_fields("weight row");
    if (f.size() != 2 || f[0] != names[k]) throw FormatError("gamma model: expected weight row '" + names[k] + "'");
    model.weights[k] = text::parse_double(f[1], names[k]);
  }
  auto b = next_fields("bias row");
  if (b.size() != 2 || b[0] != "bias") throw FormatError("gamma model: expected bias row");
  model.bias = text::parse_double(b[1], "bias");
  return model;
}

void save_gamma_regressor(const GammaRegressor& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_gamma_regressor(model, out);
}

GammaRegressor load_gamma_regressor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_gamma_regressor(in);
}

// ---------------------------------------------------------------------------

EnhanceResult enhance_clip(const Clip& clip, const GammaEstimator& estimator, const EnhanceOptions& options) {
  const std::size_t n = clip.size();
  std::vector<Gamma> gammas(n, Gamma(kGammaMin));
  std::vector<std::uint8_t> degenerate(n, 0);

  if (const auto* r = std::get_if<RegressorEstimator>(&estimator); r && r->model == nullptr) {
    throw PreconditionError("regressor estimator without a model");
  }

  if (options.per_video) {
    Gamma shared(kGammaMin);
    bool shared_degenerate = false;
    if (const auto* t = std::get_if<TargetEstimator>(&estimator)) {
      HistogramRGB pooled;
      for (const auto& f : clip.frames()) merge(pooled, histogram(f));
      auto est = estimate_gamma_target(pooled, t->target_mean);
      shared = est.gamma;
      shared_degenerate = est.degenerate;
    } else if (const auto* r = std::get_if<RegressorEstimator>(&estimator)) {
      BrightnessFeatures avg{};
      for (const auto& f : clip.frames()) {
        auto feat = brightness_features(f);
        for (std::size_t k = 0; k < kBrightnessFeatureCount; ++k) avg[k] += feat[k] / static_cast<double>(n);
      }
      shared = predict_gamma(*r->model, avg);
    } else {
      shared = std::get<FixedEstimator>(estimator).gamma;
    }
    std::fill(gammas.begin(), gammas.end(), shared);
    std::fill(degenerate.begin(), degenerate.end(), shared_degenerate ? 1 : 0);
  } else {
    parallel_for(n, options.threads, [&](std::size_t i) {
      std::visit(
          [&](const auto& e) {
            using E = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<E, TargetEstimator>) {
              auto est = estimate_gamma_target(clip[i], e.target_mean);
              gammas[i] = est.gamma;
              degenerate[i] = est.degenerate ? 1 : 0;
            } else if constexpr (std::is_same_v<E, RegressorEstimator>) {
              gammas[i] = predict_gamma(*e.model, clip[i]);
            } else {
              gammas[i] = e.gamma;
            }
          },
          estimator);
    });
  }

  std::vector<Frame> frames(clip.frames());
  parallel_for(n, options.threads, [&](std::size_t i) { frames[i] = apply_gamma(clip[i], gammas[i]); });

  EnhanceResult result{Clip(std::move(frames), clip.label()), std::move(gammas), {}};
  for (std::size_t i = 0; i < n; ++i) {
    if (degenerate[i]) result.degenerate_frames.push_back(i);
  }
  return result;
}

}  // namespace darklight
