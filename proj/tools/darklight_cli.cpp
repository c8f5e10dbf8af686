// SPDX-License-Identifier: Apache-2.0
//
// darklight command-line front end.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "darklight/config.hpp"
#include "darklight/error.hpp"
#include "darklight/experiment.hpp"
#include "darklight/geometry.hpp"
#include "darklight/indgic.hpp"
#include "darklight/media.hpp"
#include "darklight/optflow.hpp"
#include "darklight/sampler.hpp"
#include "darklight/synthetic.hpp"

namespace fs = std::filesystem;
using namespace darklight;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string config_path;

  PipelineConfig config() const {
    PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (seed) c.seed = *seed;
    c.validate();
    return c;
  }
};

bool is_ppm(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".ppm";
}

Clip load_frames(const fs::path& p) { return is_ppm(p) ? Clip({load_ppm(p)}) : load_clip(p); }

void save_frames(const Clip& clip, const fs::path& p) {
  if (is_ppm(p)) {
    if (clip.size() != 1) throw PreconditionError("a PPM output holds exactly one frame; got " + std::to_string(clip.size()));
    save_ppm(clip[0], p);
  } else {
    save_clip(clip, p);
  }
}

fs::path manifest_root(const fs::path& manifest) {
  const auto parent = manifest.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

std::vector<LabeledClip> load_data(const fs::path& manifest, Split split, unsigned threads) {
  return load_split(load_manifest(manifest), split, manifest_root(manifest), threads);
}

fs::path gamma_model_path(const PipelineConfig& config, const fs::path& classifier_path) {
  if (!config.enhancement.model_path.empty()) return config.enhancement.model_path;
  return classifier_path.string() + ".gamma.csv";
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string out;
  int train_per_class = 100;
  int test_per_class = 40;
  int frames = 64;
  int width = 170;
  int height = 128;
  double noise = 2.0;
  double gamma_lo = 2.0;
  double gamma_hi = 5.0;
  double jitter = 0.0;
  std::vector<std::string> classes;
};

int cmd_gen(const Globals& g, const GenArgs& a) {
  SyntheticSpec spec;
  if (!a.classes.empty()) {
    spec.classes.clear();
    for (const auto& c : a.classes) spec.classes.push_back(parse_motion_class(c));
  }
  spec.train_clips_per_class = a.train_per_class;
  spec.test_clips_per_class = a.test_per_class;
  spec.frames = a.frames;
  spec.width = a.width;
  spec.height = a.height;
  spec.noise = a.noise;
  spec.gamma_lo = a.gamma_lo;
  spec.gamma_hi = a.gamma_hi;
  spec.per_frame_jitter = a.jitter;
  spec.seed = g.seed.value_or(0);
  const auto manifest = gen_synthetic(spec, a.out, g.threads);
  std::cout << "wrote " << manifest.entries.size() << " clips to " << a.out << "\n";
  return kExitOk;
}

struct EnhanceArgs {
  std::string in, out;
  std::string mode = "target";
  double gamma = 1.0;
  double target_mean = kDefaultTargetMean;
  bool per_video = false;
  std::string model;
  std::string trace;
};

int cmd_enhance(const Globals& g, const EnhanceArgs& a) {
  const Clip clip = load_frames(a.in);
  const auto mode = parse_enhance_mode(a.mode);
  std::optional<GammaRegressor> regressor;
  GammaEstimator estimator = TargetEstimator{a.target_mean};
  switch (mode) {
    case EnhanceMode::target:
      break;
    case EnhanceMode::fixed:
      estimator = FixedEstimator{Gamma(a.gamma)};
      break;
    case EnhanceMode::regressor:
      if (a.model.empty()) throw PreconditionError("enhance: --mode regressor requires --model");
      regressor = load_gamma_regressor(a.model);
      estimator = RegressorEstimator{&*regressor};
      break;
    case EnhanceMode::off:
      estimator = FixedEstimator{};
      break;
  }
  const auto result = enhance_clip(clip, estimator, {a.per_video, g.threads});
  save_frames(result.clip, a.out);
  if (!a.trace.empty()) {
    std::ofstream out(a.trace, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + a.trace);
    out << "frame,gamma,degenerate\n";
    for (std::size_t i = 0; i < result.gammas.size(); ++i) {
      const bool degenerate = std::find(result.degenerate_frames.begin(), result.degenerate_frames.end(), i) !=
                              result.degenerate_frames.end();
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", result.gammas[i].value());
      out << i << ',' << buf << ',' << (degenerate ? 1 : 0) << '\n';
    }
  }
  return kExitOk;
}

struct SampleArgs {
  std::string in, out, plan;
  int omega = 4, alpha = 0, beta = 0, sigma = 4;
};

int cmd_sample(const Globals& g, const SampleArgs& a) {
  const Clip clip = load_frames(a.in);
  const SamplingParams params{a.omega, a.alpha, a.beta, a.sigma};
  Rng rng(g.seed.value_or(0));
  const auto result = delta_sample(clip, params, rng);
  save_clip(result.clip, a.out);
  if (a.plan.empty()) {
    write_plan_csv_header(std::cout);
    write_plan_csv_row(std::cout, fs::path(a.in).stem().string(), result.plan);
  } else {
    std::ofstream out(a.plan, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + a.plan);
    write_plan_csv_header(out);
    write_plan_csv_row(out, fs::path(a.in).stem().string(), result.plan);
  }
  return kExitOk;
}

struct CropArgs {
  std::string in, out;
  std::string mode = "maxcenter";
  std::optional<int> size;
};

int cmd_crop(const Globals&, const CropArgs& a) {
  const auto mode = parse_crop_mode(a.mode);
  const Clip clip = load_frames(a.in);
  save_frames(resize_for_mode(clip, mode, a.size.value_or(default_crop_side(mode))), a.out);
  return kExitOk;
}

struct FlowArgs {
  std::string in, out_dir;
  std::string method = "lk";
  int window = 15;
  double alpha = 1.0;
  int iters = 200;
};

int cmd_flow(const Globals& g, const FlowArgs& a) {
  FlowParams params;
  params.method = parse_flow_method(a.method);
  params.window = a.window;
  params.hs_alpha = a.alpha;
  params.hs_iters = a.iters;
  params.validate();
  const Clip clip = load_frames(a.in);
  const auto fields = clip_flow(clip, params, g.threads);
  fs::create_directories(a.out_dir);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "flow_%04zu.flo", i);
    save_flow(fields[i], fs::path(a.out_dir) / name);
  }
  std::cout << "wrote " << fields.size() << " flow fields to " << a.out_dir << "\n";
  return kExitOk;
}

struct FitGammaArgs {
  std::string data, out;
  std::optional<int> frames_per_clip;
};

int cmd_fit_gamma(const Globals& g, const FitGammaArgs& a) {
  const auto config = g.config();
  const auto train = load_data(a.data, Split::train, g.threads);
  const auto model =
      fit_gamma_from_split(train, a.frames_per_clip.value_or(config.enhancement.regressor_frames_per_clip));
  save_gamma_regressor(model, a.out);
  std::cout << "fitted gamma regressor on " << model.trained_on << " frames\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data, out;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
  const auto config = g.config();
  const auto train = load_data(a.data, Split::train, g.threads);
  std::optional<GammaRegressor> gamma;
  const bool regressor = config.enhancement.mode == EnhanceMode::regressor;
  if (regressor && !config.enhancement.model_path.empty()) gamma = load_gamma_regressor(config.enhancement.model_path);
  const auto trained = train_models(config, train, config.crop_train, gamma, g.threads);
  save_classifier(trained.models.classifier, a.out);
  if (regressor && config.enhancement.model_path.empty()) {
    save_gamma_regressor(*trained.models.gamma, gamma_model_path(config, a.out));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", trained.loss_trace.empty() ? 0.0 : trained.loss_trace.back());
  std::cout << "trained " << trained.models.classifier.classes << " classes on " << train.size()
            << " clips, final loss " << buf << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string data, model, report;
  std::vector<int> topk;
};

int cmd_eval(const Globals& g, const EvalArgs& a) {
  auto config = g.config();
  std::vector<int> ks = a.topk.empty() ? std::vector<int>{1, config.eval_topk} : a.topk;
  for (int k : ks) {
    if (k < 1) throw PreconditionError("--topk values must be >= 1");
  }
  PipelineModels models{load_classifier(a.model), std::nullopt};
  if (config.enhancement.mode == EnhanceMode::regressor) models.gamma = load_gamma_regressor(gamma_model_path(config, a.model));
  const auto test = load_data(a.data, Split::test, g.threads);
  const int classes = static_cast<int>(models.classifier.classes);
  const int report_k = std::min(*std::max_element(ks.begin(), ks.end()), classes);
  const auto ev = evaluate(config, models, test, config.crop_test, report_k, g.threads);
  for (int k : ks) {
    const int kk = std::min(k, classes);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", topk_accuracy(ev.scores, ev.labels, static_cast<std::size_t>(kk)));
    std::cout << "top" << k << " " << buf << "\n";
  }
  if (!a.report.empty()) {
    append_report(a.report, {ReportRow{config_hash(config), config.crop_train.mode, config.crop_test.mode,
                                       config.fusion, config.enhancement.mode, ev.top1, report_k, ev.topk,
                                       std::nullopt}});
  }
  return kExitOk;
}

struct GridArgs {
  std::string data, report;
  bool timing = false;
};

int cmd_grid(const Globals& g, const GridArgs& a) {
  const auto config = g.config();
  const auto manifest = load_manifest(a.data);
  const auto train = load_split(manifest, Split::train, manifest_root(a.data), g.threads);
  const auto test = load_split(manifest, Split::test, manifest_root(a.data), g.threads);
  const auto rows = run_crop_grid(config, train, test, {g.threads, a.timing});
  if (a.report.empty()) {
    write_report_header(std::cout, rows.front().k);
    for (const auto& r : rows) write_report_row(std::cout, r);
  } else {
    append_report(a.report, rows);
  }
  return kExitOk;
}

struct HistogramArgs {
  std::string before, after, out;
  std::optional<double> gamma;
};

int cmd_histogram(const Globals&, const HistogramArgs& a) {
  const Frame before = load_ppm(a.before);
  Frame after = before;
  if (!a.after.empty()) {
    after = load_ppm(a.after);
  } else if (a.gamma) {
    after = apply_gamma(before, Gamma(*a.gamma));
  } else {
    throw PreconditionError("histogram: give --after or --gamma");
  }
  if (a.out.empty()) {
    histogram_report(before, after, std::cout);
  } else {
    histogram_report(before, after, fs::path(a.out));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"darklight: low-light action recognition toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed (U64)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--config", g.config_path, "Pipeline config file (key = value)");

  std::function<int()> run;

  GenArgs gen;
  auto* sub = app.add_subcommand("gen-dataset", "Generate the synthetic dark-action dataset");
  sub->add_option("--out", gen.out, "Output directory")->required();
  sub->add_option("--train-per-class", gen.train_per_class)->check(CLI::NonNegativeNumber);
  sub->add_option("--test-per-class", gen.test_per_class)->check(CLI::NonNegativeNumber);
  sub->add_option("--frames", gen.frames);
  sub->add_option("--width", gen.width);
  sub->add_option("--height", gen.height);
  sub->add_option("--noise", gen.noise);
  sub->add_option("--gamma-lo", gen.gamma_lo);
  sub->add_option("--gamma-hi", gen.gamma_hi);
  sub->add_option("--jitter", gen.jitter, "Per-frame gamma jitter fraction");
  sub->add_option("--classes", gen.classes, "Comma-separated motion classes")->delimiter(',');
  sub->callback([&] { run = [&] { return cmd_gen(g, gen); }; });

  EnhanceArgs enh;
  sub = app.add_subcommand("enhance", "Brighten a clip or PPM frame with Ind-GIC");
  sub->add_option("--in", enh.in, "Input clip (.dlv) or frame (.ppm)")->required();
  sub->add_option("--out", enh.out, "Output path")->required();
  sub->add_option("--mode", enh.mode)->check(CLI::IsMember({"target", "regressor", "fixed"}));
  sub->add_option("--gamma", enh.gamma, "Gamma for fixed mode");
  sub->add_option("--target-mean", enh.target_mean);
  sub->add_flag("--per-video", enh.per_video, "One gamma for the whole clip");
  sub->add_option("--model", enh.model, "Gamma regressor CSV");
  sub->add_option("--dump-gamma-trace", enh.trace, "Write per-frame gammas as CSV");
  sub->callback([&] { run = [&] { return cmd_enhance(g, enh); }; });

  SampleArgs smp;
  sub = app.add_subcommand("sample", "Delta-sample a clip");
  sub->add_option("--in", smp.in)->required();
  sub->add_option("--out", smp.out)->required();
  sub->add_option("--plan", smp.plan, "Write the sample plan CSV here (default stdout)");
  sub->add_option("--omega", smp.omega);
  sub->add_option("--alpha", smp.alpha);
  sub->add_option("--beta", smp.beta);
  sub->add_option("--sigma", smp.sigma);
  sub->callback([&] { run = [&] { return cmd_sample(g, smp); }; });

  CropArgs crp;
  sub = app.add_subcommand("crop", "Crop or scale every frame");
  sub->add_option("--in", crp.in)->required();
  sub->add_option("--out", crp.out)->required();
  sub->add_option("--mode", crp.mode)->check(CLI::IsMember({"center", "maxcenter", "scale"}));
  sub->add_option("--size", crp.size);
  sub->callback([&] { run = [&] { return cmd_crop(g, crp); }; });

  FlowArgs flw;
  sub = app.add_subcommand("flow", "Dense optical flow between consecutive frames");
  sub->add_option("--in", flw.in)->required();
  sub->add_option("--out-dir", flw.out_dir)->required();
  sub->add_option("--method", flw.method)->check(CLI::IsMember({"lk", "hs"}));
  sub->add_option("--window", flw.window);
  sub->add_option("--alpha", flw.alpha);
  sub->add_option("--iters", flw.iters);
  sub->callback([&] { run = [&] { return cmd_flow(g, flw); }; });

  FitGammaArgs fit;
  sub = app.add_subcommand("fit-gamma", "Fit the gamma regressor on a dataset's train split");
  sub->add_option("--data", fit.data, "Manifest CSV")->required();
  sub->add_option("--out", fit.out)->required();
  sub->add_option("--frames-per-clip", fit.frames_per_clip);
  sub->callback([&] { run = [&] { return cmd_fit_gamma(g, fit); }; });

  TrainArgs trn;
  sub = app.add_subcommand("train", "Train the classifier on a dataset's train split");
  sub->add_option("--data", trn.data, "Manifest CSV")->required();
  sub->add_option("--out", trn.out, "Model CSV")->required();
  sub->callback([&] { run = [&] { return cmd_train(g, trn); }; });

  EvalArgs evl;
  sub = app.add_subcommand("eval", "Evaluate a model on a dataset's test split");
  sub->add_option("--data", evl.data, "Manifest CSV")->required();
  sub->add_option("--model", evl.model)->required();
  sub->add_option("--topk", evl.topk, "Comma-separated k values")->delimiter(',');
  sub->add_option("--report", evl.report, "Append a report row to this CSV");
  sub->callback([&] { run = [&] { return cmd_eval(g, evl); }; });

  GridArgs grd;
  sub = app.add_subcommand("grid", "3x3 train/test crop-mode grid");
  sub->add_option("--data", grd.data, "Manifest CSV")->required();
  sub->add_option("--report", grd.report, "Append report rows to this CSV (default stdout)");
  sub->add_flag("--timing", grd.timing, "Record wall time per row");
  sub->callback([&] { run = [&] { return cmd_grid(g, grd); }; });

  HistogramArgs hst;
  sub = app.add_subcommand("histogram", "Paired RGB histograms of two frames");
  sub->add_option("--before", hst.before)->required();
  sub->add_option("--after", hst.after);
  sub->add_option("--gamma", hst.gamma, "Derive the after frame with apply_gamma");
  sub->add_option("--out", hst.out, "CSV path (default stdout)");
  sub->callback([&] { run = [&] { return cmd_histogram(g, hst); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
