// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "darklight/error.hpp"
#include "darklight/experiment.hpp"
#include "darklight/synthetic.hpp"
#include "support.hpp"

using namespace darklight;

namespace {

SyntheticSpec tiny_spec() {
  SyntheticSpec s;
  s.classes = {MotionClass::translate_h, MotionClass::translate_v};
  s.train_clips_per_class = 3;
  s.test_clips_per_class = 2;
  s.frames = 12;
  s.seed = 17;
  return s;
}

PipelineConfig fast_config() {
  PipelineConfig c;
  c.classifier.epochs = 200;
  c.eval_topk = 1;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("synthetic spec validation") {
  auto s = tiny_spec();
  CHECK_NOTHROW(s.validate());
  s.classes = {MotionClass::circular};
  CHECK_THROWS_AS(s.validate(), PreconditionError);
  s = tiny_spec();
  s.gamma_lo = 0.5;
  CHECK_THROWS_AS(s.validate(), PreconditionError);
  s = tiny_spec();
  s.width = 32;
  CHECK_THROWS_AS(s.validate(), PreconditionError);
  CHECK(parse_motion_class("grow_shrink") == MotionClass::grow_shrink);
  CHECK_THROWS_AS(parse_motion_class("jump"), PreconditionError);
}

TEST_CASE("synthetic clips") {
  auto s = tiny_spec();
  s.width = 96;
  s.height = 64;
  const auto a = synthesize_clip(MotionClass::diagonal, s, 5, Split::train);
  const auto b = synthesize_clip(MotionClass::diagonal, s, 5, Split::train);
  CHECK(a.clip == b.clip);
  CHECK(a.gamma == b.gamma);
  CHECK(a.label == "diagonal");
  CHECK(a.clip.size() == 12);
  CHECK(a.gamma >= s.gamma_lo);
  CHECK(a.gamma <= s.gamma_hi);

  const auto bright = render_clip(MotionClass::diagonal, s, 5);
  for (std::size_t t = 0; t < bright.size(); ++t) {
    CHECK(mean_luma(a.clip[t]) < mean_luma(bright[t]));
    CHECK(a.clip[t] == darken(bright[t], Gamma(a.gamma)));
  }

  s.gamma_lo = s.gamma_hi = 1.0;
  const auto unit = synthesize_clip(MotionClass::diagonal, s, 5, Split::train);
  CHECK(unit.gamma == 1.0);
  CHECK(unit.clip == bright);
  CHECK(mean_luma(bright[0]) > 90.0);

  CHECK(synthesize_clip(MotionClass::diagonal, s, 6, Split::train).clip != unit.clip);
}

TEST_CASE("generate_split") {
  auto s = tiny_spec();
  s.width = 64;
  s.height = 64;
  s.frames = 4;
  const auto one = generate_split(s, Split::train, 1);
  const auto many = generate_split(s, Split::train, 3);
  REQUIRE(one.size() == 6);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].clip == many[i].clip);
    CHECK(one[i].label == (i < 3 ? "translate_h" : "translate_v"));
    CHECK(one[i].split == Split::train);
  }
  const auto test = generate_split(s, Split::test, 1);
  CHECK(test.size() == 4);
  CHECK(test[0].seed != one[0].seed);
}

TEST_CASE("manifest") {
  DatasetManifest m;
  m.entries = {{"train/a.dlv", "b", 3, 2.5, Split::train}, {"test/c.dlv", "a", 4, 4.125, Split::test}};
  std::stringstream ss;
  write_manifest(m, ss);
  CHECK(ss.str().rfind("path,label,seed,gamma,split\n", 0) == 0);
  const auto back = read_manifest(ss);
  CHECK(back.entries == m.entries);
  CHECK(back.class_list() == std::vector<std::string>{"a", "b"});
  CHECK(back.split(Split::test).size() == 1);

  std::istringstream bad("path,label,seed,gamma,split\nx.dlv,a,1,2.0,validation\n");
  CHECK_THROWS_AS(read_manifest(bad), FormatError);
}

TEST_CASE("dataset on disk") {
  auto s = tiny_spec();
  s.width = 64;
  s.height = 64;
  s.frames = 4;
  darklight::testing::TempDir dir("dataset");
  const auto m = gen_synthetic(s, dir.path());
  CHECK(m.entries.size() == 10);
  CHECK(load_manifest(dir / "manifest.csv").entries == m.entries);
  const auto train = load_split(m, Split::train, dir.path());
  const auto mem = generate_split(s, Split::train);
  REQUIRE(train.size() == mem.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    CHECK(train[i].clip == mem[i].clip);
    CHECK(train[i].label == mem[i].label);
  }

  std::filesystem::remove(dir.path() / m.split(Split::test)[1].path);
  CHECK_THROWS_AS(load_split(m, Split::test, dir.path()), Error);
}

TEST_CASE("gamma regressor from a split") {
  auto s = tiny_spec();
  s.width = 64;
  s.height = 64;
  s.frames = 4;
  const auto train = generate_split(s, Split::train);
  const auto g = fit_gamma_from_split(train, 4);
  CHECK(g == fit_gamma_from_split(train, 4));
  for (const auto& c : train) {
    const double est = predict_gamma(g, c.clip[0]).value();
    CHECK(est >= kGammaMin);
    CHECK(est <= kGammaMax);
  }
}

TEST_CASE("experiment rows") {
  const auto s = tiny_spec();
  const auto train = generate_split(s, Split::train);
  const auto test = generate_split(s, Split::test);
  const auto c = fast_config();

  const auto row = run_experiment(c, train, test);
  CHECK(row.config_hash == config_hash(c));
  CHECK(row.top1 >= 0.0);
  CHECK(row.top1 <= 1.0);
  CHECK(row.k == 1);
  CHECK(row.topk == row.top1);
  CHECK_FALSE(row.wall_time_s.has_value());
  CHECK(run_experiment(c, train, test, {1, true}).wall_time_s.has_value());

  auto unknown = test;
  unknown[0].label = "circular";
  CHECK_THROWS_AS(run_experiment(c, train, unknown), PreconditionError);

  const auto grid = run_crop_grid(c, train, test);
  REQUIRE(grid.size() == 9);
  const CropMode order[3] = {CropMode::center, CropMode::maxcenter, CropMode::scale};
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(grid[i].crop_train == order[i / 3]);
    CHECK(grid[i].crop_test == order[i % 3]);
    CHECK(grid[i].top1 >= 0.0);
    CHECK(grid[i].top1 <= 1.0);
  }
  CHECK(grid[4].top1 == row.top1);
  CHECK(grid[4].config_hash == row.config_hash);

  darklight::testing::TempDir dir("report");
  append_report(dir / "a.csv", grid);
  append_report(dir / "b.csv", run_crop_grid(c, train, test, {2, false}));
  const auto text = slurp(dir / "a.csv");
  CHECK(text == slurp(dir / "b.csv"));
  CHECK(text.rfind("config_hash,crop_train,crop_test,fusion,enhancement,top1,top1,wall_time_s\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);
  append_report(dir / "a.csv", {row});
  const auto appended = slurp(dir / "a.csv");
  CHECK(std::count(appended.begin(), appended.end(), '\n') == 11);
}

TEST_CASE("report row format") {
  ReportRow r;
  r.config_hash = "00ff00ff00ff00ff";
  r.crop_train = CropMode::center;
  r.crop_test = CropMode::scale;
  r.fusion = FusionMode::elementwise_min;
  r.enhancement = EnhanceMode::fixed;
  r.top1 = 0.5;
  r.k = 3;
  r.topk = 0.875;
  std::ostringstream os;
  write_report_header(os, 3);
  write_report_row(os, r);
  r.wall_time_s = 1.25;
  write_report_row(os, r);
  CHECK(os.str() ==
        "config_hash,crop_train,crop_test,fusion,enhancement,top1,top3,wall_time_s\n"
        "00ff00ff00ff00ff,center,scale,elementwise_min,fixed,0.5,0.875,-\n"
        "00ff00ff00ff00ff,center,scale,elementwise_min,fixed,0.5,0.875,1.25\n");
}

TEST_CASE("histogram report") {
  Rng rng(3);
  const auto before = darken(gray_frame(random_texture(40, 30, rng)), Gamma(3.0));
  const auto after = apply_gamma(before, Gamma(3.0));
  std::ostringstream os;
  const auto s = histogram_report(before, after, os);
  CHECK(s.mean_luma_after > s.mean_luma_before);
  CHECK(s.mean_luma_before == doctest::Approx(mean_luma(before)));
  for (int c = 0; c < 3; ++c) CHECK(s.channel_mean_after[c] > s.channel_mean_before[c]);

  const auto text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 1536 + 1);
  CHECK(text.rfind("image,channel,value,count\nbefore,R,0,", 0) == 0);
  CHECK(text.find("\n# summary mean_luma_before=") != std::string::npos);

  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  long long total = 0;
  for (int i = 0; i < 1536; ++i) {
    std::getline(in, line);
    total += std::stoll(line.substr(line.rfind(',') + 1));
  }
  CHECK(total == 6LL * 40 * 30);
  CHECK_THROWS_AS(histogram_report(before, Frame(4, 4), os), PreconditionError);
}
