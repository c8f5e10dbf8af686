// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "darklight/error.hpp"
#include "darklight/indgic.hpp"
#include "darklight/synthetic.hpp"
#include "support.hpp"

using namespace darklight;
using darklight::testing::random_frame;
using darklight::testing::uniform_frame;

namespace {

int transfer(int p, double exponent) {
  return static_cast<int>(std::lround(std::clamp(255.0 * std::pow(p / 255.0, exponent), 0.0, 255.0)));
}

Frame textured(Rng& rng, int side = 48) { return gray_frame(random_texture(side, side, rng, 2, 40.0)); }

}  // namespace

TEST_CASE("gamma range") {
  CHECK_NOTHROW(Gamma(1.0));
  CHECK_NOTHROW(Gamma(10.0));
  CHECK_THROWS_AS(Gamma(0.99), PreconditionError);
  CHECK_THROWS_AS(Gamma(10.01), PreconditionError);
  CHECK_THROWS_AS(Gamma(std::nan("")), PreconditionError);
  CHECK(Gamma::clamped(0.2).value() == 1.0);
  CHECK(Gamma::clamped(50.0).value() == 10.0);
  CHECK(Gamma::clamped(std::nan("")).value() == 1.0);
}

TEST_CASE("apply_gamma and darken scalar values") {
  CHECK(apply_gamma(uniform_frame(1, 1, 64), Gamma(2.0)).at(0, 0, 0) == 128);
  CHECK(darken(uniform_frame(1, 1, 128), Gamma(2.0)).at(0, 0, 0) == 64);
  for (double g : {1.0, 1.5, 2.0, 3.0, 5.0, 10.0}) {
    for (int p = 0; p < 256; ++p) {
      const auto f = uniform_frame(1, 1, static_cast<std::uint8_t>(p));
      CHECK(apply_gamma(f, Gamma(g)).at(0, 0, 0) == transfer(p, 1.0 / g));
      CHECK(darken(f, Gamma(g)).at(0, 0, 0) == transfer(p, g));
    }
  }
}

TEST_CASE("gamma one is the identity and endpoints are fixed") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_frame(rng);
    CHECK(apply_gamma(f, Gamma(1.0)) == f);
    CHECK(darken(f, Gamma(1.0)) == f);
  }
  for (double g : {1.5, 4.0, 10.0}) {
    CHECK(apply_gamma(uniform_frame(1, 1, 0), Gamma(g)).at(0, 0, 0) == 0);
    CHECK(apply_gamma(uniform_frame(1, 1, 255), Gamma(g)).at(0, 0, 0) == 255);
    CHECK(darken(uniform_frame(1, 1, 255), Gamma(g)).at(0, 0, 0) == 255);
  }
}

TEST_CASE("brightening never decreases and darkening never increases a channel") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto f = random_frame(rng);
    const Gamma g(rng.uniform(1.0, 10.0));
    const auto up = apply_gamma(f, g);
    const auto down = darken(f, g);
    for (std::size_t i = 0; i < f.pixels().size(); ++i) {
      CHECK(up.pixels()[i] >= f.pixels()[i]);
      CHECK(down.pixels()[i] <= f.pixels()[i]);
    }
    CHECK(mean_luma(down) <= mean_luma(f));
    if (!is_blank(f)) CHECK(mean_luma(up) >= mean_luma(f));
  }
}

TEST_CASE("mean enhanced intensity") {
  CHECK(mean_enhanced_intensity(Frame(3, 2), Gamma(4.0)) == 0.0);
  CHECK(mean_enhanced_intensity(uniform_frame(3, 2, 255), Gamma(4.0)) == doctest::Approx(255.0));
  CHECK(mean_enhanced_intensity(uniform_frame(1, 1, 64), Gamma(2.0)) == doctest::Approx(127.749).epsilon(1e-5));

  Rng rng(3);
  const auto f = random_frame(rng, 9, 7);
  double direct = 0.0;
  for (auto p : f.pixels()) direct += 255.0 * std::pow(p / 255.0, 1.0 / 2.5);
  direct /= static_cast<double>(f.pixels().size());
  CHECK(mean_enhanced_intensity(f, Gamma(2.5)) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(mean_enhanced_intensity(histogram(f), Gamma(2.5)) == doctest::Approx(direct).epsilon(1e-12));

  double prev = -1.0;
  for (double g = 1.0; g <= 10.0; g += 0.5) {
    const double m = mean_enhanced_intensity(f, Gamma(g));
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("target estimator") {
  CHECK(estimate_gamma_target(uniform_frame(2, 2, 64), 127.749).gamma.value() == doctest::Approx(2.0).epsilon(0.005));
  const auto bright = estimate_gamma_target(uniform_frame(2, 2, 150), 102.0);
  CHECK(bright.gamma.value() == 1.0);
  CHECK_FALSE(bright.degenerate);
  const auto black = estimate_gamma_target(Frame(4, 4), 102.0);
  CHECK(black.gamma.value() == 10.0);
  CHECK(black.degenerate);
  CHECK(estimate_gamma_target(uniform_frame(2, 2, 1), 200.0).gamma.value() == 10.0);
  CHECK_THROWS_AS(estimate_gamma_target(uniform_frame(2, 2, 1), 0.0), PreconditionError);
  CHECK_THROWS_AS(estimate_gamma_target(uniform_frame(2, 2, 1), 255.0), PreconditionError);
}

TEST_CASE("uniform round trip is consistent with 8-bit quantization") {
  // Every gamma that darkens v to the same level d is indistinguishable, so the
  // estimate must land in that interval; the 10% bound holds where the
  // interval is narrow enough (v >= 75 over gamma in [1.5, 5]).
  Rng rng(4);
  for (int t = 0; t < 2000; ++t) {
    const int v = static_cast<int>(rng.uniform_int(16, 240));
    const double g = rng.uniform(1.5, 5.0);
    const auto f = uniform_frame(2, 2, static_cast<std::uint8_t>(v));
    const auto dark = darken(f, Gamma(g));
    const int d = dark.at(0, 0, 0);
    const auto est = estimate_gamma_target(dark, mean_luma(f));
    if (d == 0) {
      CHECK(est.degenerate);
      continue;
    }
    const double lv = std::log(v / 255.0);
    const double g_hi = std::min(10.0, std::log((d - 0.5) / 255.0) / lv);
    const double g_lo = std::max(1.0, std::log(std::min(d + 0.5, 255.0) / 255.0) / lv);
    CHECK(est.gamma.value() >= g_lo - 1e-6);
    CHECK(est.gamma.value() <= g_hi + 1e-6);
    if (v >= 75) CHECK(std::abs(est.gamma.value() - g) / g <= 0.10);
  }
}

TEST_CASE("brightness features") {
  const auto names = brightness_feature_names();
  CHECK(names.size() == 13);
  const auto black = brightness_features(Frame(4, 4));
  CHECK(black[0] == 0.0);
  CHECK(black[10] == 1.0);
  CHECK(black[11] == 0.0);
  const auto white = brightness_features(uniform_frame(4, 4, 255));
  CHECK(white[0] == doctest::Approx(1.0));
  CHECK(white[1] == doctest::Approx(0.0));
  CHECK(white[11] == 1.0);
  CHECK(white[12] == doctest::Approx(std::log1p(255.0)));
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto f = brightness_features(random_frame(rng));
    for (double v : f) CHECK(std::isfinite(v));
    for (int i = 2; i < 6; ++i) CHECK(f[i] <= f[i + 1]);
    CHECK(f[10] >= 0.0);
    CHECK(f[10] <= 1.0);
    CHECK(f[11] >= 0.0);
    CHECK(f[11] <= 1.0);
  }
}

TEST_CASE("regressor fit") {
  Rng rng(6);
  const auto base = textured(rng);

  SUBCASE("one frame at several gammas is recovered in sample") {
    std::vector<std::pair<Frame, Gamma>> pairs;
    for (double g : {1.5, 2.0, 3.0, 5.0}) {
      for (int k = 0; k < 50; ++k) pairs.emplace_back(darken(base, Gamma(g)), Gamma(g));
    }
    const auto model = fit_gamma_regressor(pairs);
    CHECK(model.trained_on == 200);
    for (double g : {1.5, 2.0, 3.0, 5.0}) {
      CHECK(std::abs(predict_gamma(model, darken(base, Gamma(g))).value() - g) / g <= 0.05);
    }
  }

  SUBCASE("constant labels") {
    std::vector<std::pair<Frame, Gamma>> pairs;
    for (int k = 0; k < 20; ++k) pairs.emplace_back(random_frame(rng, 8, 8), Gamma(1.0));
    const auto model = fit_gamma_regressor(pairs);
    for (const auto& [f, g] : pairs) CHECK(predict_gamma(model, f).value() == doctest::Approx(1.0).epsilon(1e-3));
  }

  SUBCASE("too few pairs") {
    std::vector<std::pair<Frame, Gamma>> pairs(5, {base, Gamma(2.0)});
    CHECK_THROWS_WITH_AS(fit_gamma_regressor(pairs), doctest::Contains("insufficient training data"),
                         PreconditionError);
  }

  SUBCASE("trained on darkened textures") {
    std::vector<std::pair<Frame, Gamma>> pairs;
    for (int k = 0; k < 150; ++k) {
      const auto src = textured(rng, 32);
      const double g = rng.uniform(1.0, 6.0);
      pairs.emplace_back(darken(src, Gamma(g)), Gamma(g));
    }
    const Frame src3 = textured(rng, 32);
    pairs.emplace_back(darken(src3, Gamma(3.0)), Gamma(3.0));
    const auto model = fit_gamma_regressor(pairs);
    const double p3 = predict_gamma(model, darken(src3, Gamma(3.0))).value();
    CHECK(p3 >= 2.4);
    CHECK(p3 <= 3.6);
    CHECK(predict_gamma(model, uniform_frame(16, 16, 255)).value() == 1.0);
    for (int k = 0; k < 50; ++k) {
      const double g = predict_gamma(model, random_frame(rng)).value();
      CHECK(g >= 1.0);
      CHECK(g <= 10.0);
    }
  }
}

TEST_CASE("regressor csv round trip") {
  GammaRegressor m;
  Rng rng(7);
  for (auto& w : m.weights) w = rng.normal();
  m.bias = -0.125;
  m.trained_on = 77;
  std::stringstream ss;
  write_gamma_regressor(m, ss);
  const auto text = ss.str();
  CHECK(text.rfind("schema,bf-v1,trained_on,77\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 15);
  CHECK(read_gamma_regressor(ss) == m);

  std::istringstream bad_schema("schema,bf-v0,trained_on,1\n");
  CHECK_THROWS_AS(read_gamma_regressor(bad_schema), FormatError);
}

TEST_CASE("enhance clip") {
  Rng rng(8);
  const auto base = textured(rng);
  const double target = mean_luma(base);
  const Clip dark({darken(base, Gamma(2.0)), darken(base, Gamma(4.0))});

  const auto r = enhance_clip(dark, TargetEstimator{target});
  REQUIRE(r.gammas.size() == 2);
  CHECK(std::abs(r.gammas[0].value() - 2.0) / 2.0 <= 0.15);
  CHECK(std::abs(r.gammas[1].value() - 4.0) / 4.0 <= 0.15);
  CHECK(r.clip.size() == 2);
  CHECK(r.clip.width() == dark.width());

  CHECK(enhance_clip(dark, FixedEstimator{Gamma(1.0)}).clip == dark);

  const auto pooled = enhance_clip(dark, TargetEstimator{target}, {true, 1});
  CHECK(pooled.gammas[0] == pooled.gammas[1]);

  const Clip with_black({Frame(8, 8), uniform_frame(8, 8, 20)});
  const auto rb = enhance_clip(with_black, TargetEstimator{});
  CHECK(rb.degenerate_frames == std::vector<std::size_t>{0});

  const auto clip = darklight::testing::random_clip(rng, 9, 12, 10);
  const auto one = enhance_clip(clip, TargetEstimator{}, {false, 1});
  const auto four = enhance_clip(clip, TargetEstimator{}, {false, 4});
  CHECK(one.clip == four.clip);
  CHECK(one.gammas == four.gammas);
}
