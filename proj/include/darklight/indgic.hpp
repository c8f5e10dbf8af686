// SPDX-License-Identifier: Apache-2.0
//
// Independent gamma intensity correction: every frame gets its own gamma.
// The transfer is p -> 255 * (p / 255)^(1 / gamma); gamma > 1 brightens.
#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "darklight/media.hpp"

namespace darklight {

inline constexpr double kGammaMin = 1.0;
inline constexpr double kGammaMax = 10.0;
inline constexpr double kDefaultTargetMean = 102.0;

/// Gamma in [kGammaMin, kGammaMax].
class Gamma {
 public:
  /// Throws PreconditionError when outside the valid range.
  explicit Gamma(double value);
  /// Clamps into the valid range (NaN maps to kGammaMin).
  static Gamma clamped(double value);

  double value() const { return value_; }
  bool operator==(const Gamma&) const = default;

 private:
  struct Unchecked {};
  Gamma(double value, Unchecked) : value_(value) {}
  double value_;
};

Frame apply_gamma(const Frame& frame, Gamma gamma);
/// Inverse transfer p -> 255 * (p / 255)^gamma, used to synthesize dark training frames.
Frame darken(const Frame& frame, Gamma gamma);

/// Average of 255 * (p / 255)^(1 / gamma) over every channel value, unrounded.
double mean_enhanced_intensity(const Frame& frame, Gamma gamma);
double mean_enhanced_intensity(const HistogramRGB& hist, Gamma gamma);

struct GammaEstimate {
  Gamma gamma{kGammaMin};
  /// Set when no gamma can change the input (all-black content).
  bool degenerate = false;
};

/// Closed-loop estimate: bisection for the gamma whose mean enhanced intensity
/// reaches `target_mean`.
GammaEstimate estimate_gamma_target(const Frame& frame, double target_mean);
GammaEstimate estimate_gamma_target(const HistogramRGB& hist, double target_mean);

/// Brightness statistics consumed by the gamma regressor (schema "bf-v1").
inline constexpr std::size_t kBrightnessFeatureCount = 13;
inline constexpr const char* kBrightnessSchema = "bf-v1";
using BrightnessFeatures = std::array<double, kBrightnessFeatureCount>;

/// Names of the BrightnessFeatures entries, in order.
const std::array<std::string, kBrightnessFeatureCount>& brightness_feature_names();
BrightnessFeatures brightness_features(const Frame& frame);

/// Linear model of log(gamma) over brightness statistics.
struct GammaRegressor {
  BrightnessFeatures weights{};
  double bias = 0.0;
  std::size_t trained_on = 0;

  bool operator==(const GammaRegressor&) const = default;
};

inline constexpr double kGammaRidge = 1e-6;

/// Ridge least squares of log(gamma) on brightness_features.
/// Requires more pairs than features (at least 14).
GammaRegressor fit_gamma_regressor(const std::vector<std::pair<Frame, Gamma>>& training_pairs);
GammaRegressor fit_gamma_regressor(const std::vector<BrightnessFeatures>& features,
                                   const std::vector<Gamma>& labels);
Gamma predict_gamma(const GammaRegressor& model, const Frame& frame);
Gamma predict_gamma(const GammaRegressor& model, const BrightnessFeatures& features);

void write_gamma_regressor(const GammaRegressor& model, std::ostream& out);
GammaRegressor read_gamma_regressor(std::istream& in);
void save_gamma_regressor(const GammaRegressor& model, const std::filesystem::path& path);
GammaRegressor load_gamma_regressor(const std::filesystem::path& path);

/// How enhance_clip chooses each gamma.
struct TargetEstimator {
  double target_mean = kDefaultTargetMean;
};
struct RegressorEstimator {
  const GammaRegressor* model = nullptr;
};
struct FixedEstimator {
  Gamma gamma{kGammaMin};
};
using GammaEstimator = std::variant<TargetEstimator, RegressorEstimator, FixedEstimator>;

struct EnhanceOptions {
  /// One gamma shared by all frames, estimated from pooled clip statistics.
  bool per_video = false;
  unsigned threads = 1;
};

struct EnhanceResult {
  Clip clip;
  std::vector<Gamma> gammas;
  /// Frames whose estimate was degenerate (black input).
  std::vector<std::size_t> degenerate_frames;
};

/// Enhances each frame with its own independently estimated gamma.
EnhanceResult enhance_clip(const Clip& clip, const GammaEstimator& estimator, const EnhanceOptions& options = {});

}  // namespace darklight
