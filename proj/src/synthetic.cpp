// SPDX-License-Identifier: Apache-2.0
#include "darklight/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>

#include "darklight/error.hpp"
#include "darklight/indgic.hpp"
#include "darklight/parallel.hpp"
#include "text.hpp"

namespace darklight {

namespace {

constexpr double kPi = std::numbers::pi;

void box_blur(std::vector<double>& a, int w, int h, int r) {
  std::vector<double> tmp(a.size());
  const double inv = 1.0 / (2 * r + 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k) s += a[static_cast<std::size_t>(y) * w + std::clamp(x + k, 0, w - 1)];
      tmp[static_cast<std::size_t>(y) * w + x] = s * inv;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k) s += tmp[static_cast<std::size_t>(std::clamp(y + k, 0, h - 1)) * w + x];
      a[static_cast<std::size_t>(y) * w + x] = s * inv;
    }
  }
}

/// Bilinear lookup with edge clamping.
double sample(const Plane& p, double x, double y) {
  x = std::clamp(x, 0.0, p.width - 1.0);
  y = std::clamp(y, 0.0, p.height - 1.0);
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, p.width - 1);
  const int y1 = std::min(y0 + 1, p.height - 1);
  const double tx = x - x0;
  const double ty = y - y0;
  return (1 - ty) * ((1 - tx) * p.at(x0, y0) + tx * p.at(x1, y0)) + ty * ((1 - tx) * p.at(x0, y1) + tx * p.at(x1, y1));
}

/// Object trajectory and size over time.
struct Motion {
  double cx0, cy0;
  double vx = 0.0, vy = 0.0;
  double orbit_radius = 0.0, orbit_rate = 0.0, orbit_phase = 0.0;
  double radius0;
  double pulse_amplitude = 0.0, pulse_rate = 0.0, pulse_phase = 0.0;

  double cx(double t) const { return cx0 + vx * t + orbit_radius * std::cos(orbit_rate * t + orbit_phase); }
  double cy(double t) const { return cy0 + vy * t + orbit_radius * std::sin(orbit_rate * t + orbit_phase); }
  double radius(double t) const { return radius0 + pulse_amplitude * std::sin(pulse_rate * t + pulse_phase); }
};

Motion draw_motion(MotionClass cls, const SyntheticSpec& spec, Rng& rng) {
  Motion m{};
  const double frames = spec.frames;
  m.radius0 = rng.uniform(28.0, 36.0);
  m.cx0 = spec.width / 2.0 + rng.uniform(-12.0, 12.0);
  m.cy0 = spec.height / 2.0 + rng.uniform(-12.0, 12.0);
  const double speed = rng.uniform(0.30, 0.45);  // px per source frame
  const double sign_a = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  const double sign_b = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  // Linear motions are centered on the mid-clip frame.
  auto centre_path = [&] {
    m.cx0 -= m.vx * frames / 2.0;
    m.cy0 -= m.vy * frames / 2.0;
  };
  switch (cls) {
    case MotionClass::translate_h:
      m.vx = sign_a * speed;
      centre_path();
      break;
    case MotionClass::translate_v:
      m.vy = sign_a * speed;
      centre_path();
      break;
    case MotionClass::diagonal:
      m.vx = sign_a * speed / std::numbers::sqrt2;
      m.vy = sign_b * speed / std::numbers::sqrt2;
      centre_path();
      break;
    case MotionClass::circular:
      // One revolution per clip.
      m.orbit_rate = sign_a * 2.0 * kPi / frames;
      m.orbit_radius = speed * frames / (2.0 * kPi);
      m.orbit_phase = rng.uniform(0.0, 2.0 * kPi);
      break;
    case MotionClass::grow_shrink:
      m.pulse_amplitude = rng.uniform(5.0, 8.0);
      m.pulse_rate = 2.0 * kPi / frames;
      m.pulse_phase = rng.uniform(0.0, 2.0 * kPi);
      break;
  }
  return m;
}

}  // namespace

std::string_view to_string(MotionClass motion) {
  switch (motion) {
    case MotionClass::translate_h:
      return "translate_h";
    case MotionClass::translate_v:
      return "translate_v";
    case MotionClass::diagonal:
      return "diagonal";
    case MotionClass::circular:
      return "circular";
    case MotionClass::grow_shrink:
      return "grow_shrink";
  }
  return "?";
}

MotionClass parse_motion_class(std::string_view name) {
  for (auto m : all_motion_classes()) {
    if (to_string(m) == name) return m;
  }
  throw PreconditionError("unknown motion class '" + std::string(name) + "'");
}

const std::vector<MotionClass>& all_motion_classes() {
  static const std::vector<MotionClass> all = {MotionClass::translate_h, MotionClass::translate_v,
                                               MotionClass::diagonal, MotionClass::circular,
                                               MotionClass::grow_shrink};
  return all;
}

Plane random_texture(int width, int height, Rng& rng, int blur_radius, double contrast) {
  if (width < 1 || height < 1) throw PreconditionError("random_texture: empty size");
  Plane p(width, height);
  for (auto& v : p.values) v = rng.uniform01();
  for (int pass = 0; pass < 3 && blur_radius > 0; ++pass) box_blur(p.values, width, height, blur_radius);
  double mean = 0.0;
  for (double v : p.values) mean += v;
  mean /= static_cast<double>(p.values.size());
  double var = 0.0;
  for (double v : p.values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(p.values.size()));
  for (auto& v : p.values) v = std::clamp(128.0 + contrast * (sd > 0.0 ? (v - mean) / sd : 0.0), 0.0, 255.0);
  return p;
}

Frame gray_frame(const Plane& texture) {
  Frame f(texture.width, texture.height);
  auto px = f.pixels();
  for (std::size_t i = 0; i < texture.values.size(); ++i) {
    const auto v = to_channel(texture.values[i]);
    px[3 * i] = px[3 * i + 1] = px[3 * i + 2] = v;
  }
  return f;
}

void SyntheticSpec::validate() const {
  if (classes.size() < 2) throw PreconditionError("synthetic: need at least two classes");
  if (std::set<MotionClass>(classes.begin(), classes.end()).size() != classes.size()) {
    throw PreconditionError("synthetic: duplicate classes");
  }
  if (train_clips_per_class < 0 || test_clips_per_class < 0) throw PreconditionError("synthetic: negative clip count");
  if (frames < 2) throw PreconditionError("synthetic: need at least two frames per clip");
  if (width < 64 || height < 64) throw PreconditionError("synthetic: frames must be at least 64x64");
  if (!(noise >= 0.0)) throw PreconditionError("synthetic: noise must be >= 0");
  if (!(gamma_lo >= kGammaMin && gamma_hi <= kGammaMax && gamma_lo <= gamma_hi)) {
    throw PreconditionError("synthetic: gamma range must satisfy 1 <= lo <= hi <= 10");
  }
  if (!(per_frame_jitter >= 0.0 && per_frame_jitter < 1.0)) throw PreconditionError("synthetic: jitter in [0, 1)");
}

Clip render_clip(MotionClass motion, const SyntheticSpec& spec, std::uint64_t clip_seed) {
  spec.validate();
  Rng rng(clip_seed);
  const int w = spec.width;
  const int h = spec.height;

  Plane background = random_texture(w, h, rng, 3, 45.0);
  const double base = rng.uniform(110.0, 150.0);
  const std::array<double, 3> bg_tint = {rng.uniform(0.85, 1.1), rng.uniform(0.85, 1.1), rng.uniform(0.85, 1.1)};
  const std::array<double, 3> obj_tint = {rng.uniform(0.85, 1.1), rng.uniform(0.85, 1.1), rng.uniform(0.85, 1.1)};
  const Plane object = random_texture(96, 96, rng, 2, 200.0);
  const Motion m = draw_motion(motion, spec, rng);
  const double noise_half_width = spec.noise * std::sqrt(3.0);  // uniform noise with this std

  std::vector<Frame> frames;
  frames.reserve(spec.frames);
  for (int t = 0; t < spec.frames; ++t) {
    const double cx = m.cx(t);
    const double cy = m.cy(t);
    const double r = m.radius(t);
    const double tex_scale = m.radius0 / r;
    Frame f(w, h);
    auto px = f.pixels();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double bg = background.at(x, y) - 128.0 + base;
        const double dx = x - cx;
        const double dy = y - cy;
        const double coverage = std::clamp(r - std::sqrt(dx * dx + dy * dy) + 0.5, 0.0, 1.0);
        const double obj = coverage > 0.0 ? sample(object, 48.0 + dx * tex_scale, 48.0 + dy * tex_scale) : 0.0;
        const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
        for (int c = 0; c < 3; ++c) {
          const double v = coverage * obj * obj_tint[c] + (1.0 - coverage) * bg * bg_tint[c];
          const double n = noise_half_width > 0.0 ? rng.uniform(-noise_half_width, noise_half_width) : 0.0;
          px[i + c] = to_channel(v + n);
        }
      }
    }
    frames.push_back(std::move(f));
  }
  return Clip(std::move(frames), std::string(to_string(motion)));
}

LabeledClip synthesize_clip(MotionClass motion, const SyntheticSpec& spec, std::uint64_t clip_seed, Split split) {
  Clip bright = render_clip(motion, spec, clip_seed);
  Rng rng(mix64(clip_seed ^ 0x5eedda4cULL));
  const double gamma = rng.uniform(spec.gamma_lo, spec.gamma_hi);
  const double clip_gamma = spec.gamma_lo == spec.gamma_hi ? spec.gamma_lo : gamma;
  std::vector<Frame> frames;
  frames.reserve(bright.size());
  double first_gamma = clip_gamma;
  for (std::size_t t = 0; t < bright.size(); ++t) {
    double g = clip_gamma;
    if (spec.per_frame_jitter > 0.0) {
      g = Gamma::clamped(clip_gamma * (1.0 + rng.uniform(-spec.per_frame_jitter, spec.per_frame_jitter))).value();
    }
    if (t == 0) first_gamma = g;
    frames.push_back(darken(bright[t], Gamma(g)));
  }
  return {Clip(std::move(frames), bright.label()), std::string(to_string(motion)), clip_seed, first_gamma, split};
}

std::vector<LabeledClip> generate_split(const SyntheticSpec& spec, Split split, unsigned threads) {
  spec.validate();
  const int per_class = split == Split::train ? spec.train_clips_per_class : spec.test_clips_per_class;
  const std::size_t total = spec.classes.size() * static_cast<std::size_t>(per_class);
  const std::uint64_t split_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(split));
  std::vector<std::optional<LabeledClip>> slots(total);
  parallel_for(total, threads, [&](std::size_t i) {
    const auto cls = spec.classes[i / per_class];
    const auto class_index = static_cast<std::uint64_t>(cls);
    const std::uint64_t seed = derive_seed(split_seed, class_index * 1'000'003ULL + i % per_class);
    slots[i] = synthesize_clip(cls, spec, seed, split);
  });
  std::vector<LabeledClip> out;
  out.reserve(total);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Split split) { return split == Split::train ? "train" : "test"; }

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "test") return Split::test;
  throw FormatError("unknown split '" + std::string(name) + "'");
}

std::vector<std::string> DatasetManifest::class_list() const {
  std::set<std::string> labels;
  for (const auto& e : entries) labels.insert(e.label);
  return {labels.begin(), labels.end()};
}

std::vector<ManifestEntry> DatasetManifest::split(Split which) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries) {
    if (e.split == which) out.push_back(e);
  }
  return out;
}

void write_manifest(const DatasetManifest& manifest, std::ostream& out) {
  out << "path,label,seed,gamma,split\n";
  for (const auto& e : manifest.entries) {
    if (e.path.find_first_of(",\n") != std::string::npos || e.label.find_first_of(",\n") != std::string::npos) {
      throw PreconditionError("manifest: paths and labels may not contain commas or newlines");
    }
    out << e.path << ',' << e.label << ',' << e.seed << ',' << text::format_double(e.gamma) << ',' << to_string(e.split)
        << '\n';
  }
}

DatasetManifest read_manifest(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "path,label,seed,gamma,split") {
    throw FormatError("manifest: expected header 'path,label,seed,gamma,split'");
  }
  DatasetManifest m;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto f = text::split(text::trim(line), ',');
    if (f.size() != 5) throw FormatError("manifest line " + std::to_string(line_no) + ": expected 5 fields");
    ManifestEntry e;
    e.path = f[0];
    e.label = f[1];
    if (e.path.empty() || e.label.empty()) throw FormatError("manifest line " + std::to_string(line_no) + ": empty field");
    e.seed = text::parse_int<std::uint64_t>(f[2], "seed");
    e.gamma = text::parse_double(f[3], "gamma");
    e.split = parse_split(f[4]);
    m.entries.push_back(std::move(e));
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_manifest(in);
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_manifest(manifest, out);
}

DatasetManifest gen_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir, unsigned threads) {
  spec.validate();
  DatasetManifest manifest;
  for (Split split : {Split::train, Split::test}) {
    const auto dir = out_dir / std::string(to_string(split));
    std::filesystem::create_directories(dir);
    const int per_class = split == Split::train ? spec.train_clips_per_class : spec.test_clips_per_class;
    const auto clips = generate_split(spec, split, threads);
    std::vector<ManifestEntry> entries(clips.size());
    parallel_for(clips.size(), threads, [&](std::size_t i) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%04zu.dlv", clips[i].label.c_str(), i % per_class);
      const auto rel = std::filesystem::path(std::string(to_string(split))) / name;
      save_clip(clips[i].clip, out_dir / rel);
      entries[i] = {rel.generic_string(), clips[i].label, clips[i].seed, clips[i].gamma, split};
    });
    manifest.entries.insert(manifest.entries.end(), entries.begin(), entries.end());
  }
  save_manifest(manifest, out_dir / "manifest.csv");
  return manifest;
}

std::vector<LabeledClip> load_split(const DatasetManifest& manifest, Split which, const std::filesystem::path& root,
                                    unsigned threads) {
  const auto entries = manifest.split(which);
  std::vector<std::optional<LabeledClip>> slots(entries.size());
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    const auto& e = entries[i];
    const std::filesystem::path p = std::filesystem::path(e.path).is_absolute() ? std::filesystem::path(e.path) : root / e.path;
    try {
      slots[i] = LabeledClip{load_clip(p), e.label, e.seed, e.gamma, e.split};
    } catch (const Error& err) {
      throw FormatError("manifest entry '" + e.path + "': " + err.what());
    }
  });
  std::vector<LabeledClip> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace darklight
