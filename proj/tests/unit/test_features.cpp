// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "darklight/error.hpp"
#include "darklight/features.hpp"
#include "support.hpp"

using namespace darklight;
using darklight::testing::random_clip;
using darklight::testing::uniform_frame;

namespace {

FlowField uniform_flow(int w, int h, float u, float v) {
  return FlowField(w, h, std::vector<FlowVector>(static_cast<std::size_t>(w) * h, FlowVector{u, v}));
}

FeatureVector random_nonneg(Rng& rng, std::size_t n) {
  FeatureVector f{std::vector<double>(n), "app-g2"};
  for (auto& v : f.values) v = rng.uniform01();
  return f;
}

}  // namespace

TEST_CASE("schemas") {
  CHECK(appearance_schema(4) == "app-g4");
  CHECK(hof_schema(4, 8) == "hof-g4-b8");
  CHECK(schema_length("app-g4") == 32);
  CHECK(schema_length("hof-g4-b8") == 128);
  CHECK(schema_length("fused-concat:app-g4") == 64);
  CHECK(schema_length("fused-min:app-g4") == 32);
  CHECK(schema_length("fused-concat:app-g4+hof-g4-b8") == 192);
  CHECK_THROWS_AS(schema_length("pixels"), PreconditionError);
  CHECK_THROWS_AS(schema_length("app-gx"), PreconditionError);
  CHECK_THROWS_AS(schema_length("hof-g4"), PreconditionError);
}

TEST_CASE("appearance features") {
  const auto black = extract_appearance(Clip({Frame(8, 8), Frame(8, 8), Frame(8, 8)}), 4);
  CHECK(black.schema == "app-g4");
  CHECK(black.size() == 32);
  for (double v : black.values) CHECK(v == 0.0);

  Rng rng(1);
  const auto f = darklight::testing::random_frame(rng, 8, 8);
  const auto still = extract_appearance(Clip({f, f, f}), 4);
  for (std::size_t i = 16; i < 32; ++i) CHECK(still.values[i] == 0.0);

  const auto single = extract_appearance(Clip({f}), 2);
  for (std::size_t i = 4; i < 8; ++i) CHECK(single.values[i] == 0.0);

  const auto step = extract_appearance(Clip({uniform_frame(8, 8, 10), uniform_frame(8, 8, 61)}), 4);
  for (std::size_t i = 16; i < 32; ++i) CHECK(step.values[i] == doctest::Approx(0.2));
  for (std::size_t i = 0; i < 16; ++i) CHECK(step.values[i] == doctest::Approx(35.5 / 255.0));

  Frame left(4, 2);
  for (int y = 0; y < 2; ++y) {
    for (int c = 0; c < 3; ++c) left.at(0, y, c) = left.at(1, y, c) = 255;
  }
  const auto cells = extract_appearance(Clip({left}), 2);
  CHECK(cells.values[0] == doctest::Approx(1.0));
  CHECK(cells.values[1] == 0.0);
  CHECK(cells.values[2] == doctest::Approx(1.0));
  CHECK(cells.values[3] == 0.0);
}

TEST_CASE("appearance features are bounded") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto clip = random_clip(rng, static_cast<std::size_t>(rng.uniform_int(1, 5)), 8, 8);
    for (double v : extract_appearance(clip, static_cast<int>(rng.uniform_int(1, 8))).values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK_THROWS_AS(extract_appearance(Clip({Frame(3, 3)}), 4), PreconditionError);
}

TEST_CASE("hof") {
  const auto zero = extract_hof({FlowField(8, 8)}, 4, 8);
  CHECK(zero.schema == "hof-g4-b8");
  CHECK(zero.size() == 128);
  for (double v : zero.values) CHECK(v == 0.0);

  const auto right = extract_hof({uniform_flow(8, 8, 1.0F, 0.0F)}, 4, 8);
  const auto down = extract_hof({uniform_flow(8, 8, 0.0F, 1.0F)}, 4, 8);
  for (int cell = 0; cell < 16; ++cell) {
    for (int b = 0; b < 8; ++b) {
      CHECK(right.values[cell * 8 + b] == (b == 4 ? 1.0 : 0.0));
      CHECK(down.values[cell * 8 + (b + 2) % 8] == right.values[cell * 8 + b]);
    }
  }

  const auto left = extract_hof({uniform_flow(4, 4, -1.0F, 0.0F)}, 1, 8);
  CHECK(left.values[0] == 1.0);

  FlowField pad = uniform_flow(8, 8, 0.0F, 3.0F);
  pad.set_padding(true);
  CHECK(extract_hof({pad, uniform_flow(8, 8, 1.0F, 0.0F)}, 4, 8) == right);
  CHECK_THROWS_AS(extract_hof({}, 4, 8), PreconditionError);
}

TEST_CASE("hof cells are normalized or zero") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<FlowField> fields;
    for (int k = 0; k < 3; ++k) {
      FlowField f(12, 12);
      for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 12; ++x) {
          if (rng.uniform01() < 0.6) f.set(x, y, {static_cast<float>(rng.normal()), static_cast<float>(rng.normal())});
        }
      }
      fields.push_back(std::move(f));
    }
    const int bins = static_cast<int>(rng.uniform_int(2, 12));
    const auto h = extract_hof(fields, 3, bins);
    for (int cell = 0; cell < 9; ++cell) {
      double sum = 0.0;
      for (int b = 0; b < bins; ++b) {
        CHECK(h.values[cell * bins + b] >= 0.0);
        sum += h.values[cell * bins + b];
      }
      CHECK((sum == 0.0 || std::abs(sum - 1.0) < 1e-9));
    }
  }
}

TEST_CASE("fusion") {
  Rng rng(4);
  const auto x = random_nonneg(rng, 8);
  const auto y = random_nonneg(rng, 8);
  const auto z = random_nonneg(rng, 8);
  const FeatureVector zero{std::vector<double>(8, 0.0), "app-g2"};

  CHECK(fuse(x, x, FusionMode::elementwise_min).values == x.values);
  CHECK(fuse(x, zero, FusionMode::elementwise_min).values == zero.values);
  const auto cat = fuse(x, y, FusionMode::concat);
  CHECK(cat.size() == 16);
  CHECK(cat.schema == "fused-concat:app-g2");
  CHECK(fuse(x, y, FusionMode::elementwise_min).schema == "fused-min:app-g2");
  CHECK_THROWS_AS(fuse(x, FeatureVector{{1.0}, "app-g1"}, FusionMode::concat), PreconditionError);

  const auto j = join(cat, FeatureVector{std::vector<double>(16, 0.5), "hof-g2-b4"});
  CHECK(j.schema == "fused-concat:app-g2+hof-g2-b4");
  CHECK(j.size() == schema_length(j.schema));

  CHECK(parse_fusion_mode("min") == FusionMode::elementwise_min);
  CHECK(parse_fusion_mode("concat") == FusionMode::concat);
}

TEST_CASE("elementwise min algebra") {
  Rng rng(5);
  auto mn = [](const FeatureVector& a, const FeatureVector& b) {
    auto r = fuse(a, b, FusionMode::elementwise_min);
    r.schema = a.schema;
    return r;
  };
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 20));
    const auto a = random_nonneg(rng, n);
    const auto b = random_nonneg(rng, n);
    const auto c = random_nonneg(rng, n);
    CHECK(mn(a, b).values == mn(b, a).values);
    CHECK(mn(mn(a, b), c).values == mn(a, mn(b, c)).values);
    CHECK(mn(a, a).values == a.values);
  }
}
