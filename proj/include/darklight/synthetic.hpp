// SPDX-License-Identifier: Apache-2.0
//
// Synthetic dark-action clips and the dataset manifest.
//
// Each clip shows a textured disk moving over a static textured background
// according to its class, rendered at normal brightness and then darkened
// with a per-clip gamma drawn from [gamma_lo, gamma_hi].
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "darklight/media.hpp"
#include "darklight/pipeline.hpp"
#include "darklight/rng.hpp"

namespace darklight {

enum class MotionClass { translate_h, translate_v, diagonal, circular, grow_shrink };

std::string_view to_string(MotionClass motion);
MotionClass parse_motion_class(std::string_view name);
const std::vector<MotionClass>& all_motion_classes();

/// Blurred uniform noise (three box passes of the given radius), standardized
/// to mean 128 and standard deviation `contrast` levels, then clipped. Values
/// are 8-bit levels in [0, 255].
Plane random_texture(int width, int height, Rng& rng, int blur_radius = 2, double contrast = 200.0);

/// Gray frame from a texture of the same size.
Frame gray_frame(const Plane& texture);

struct SyntheticSpec {
  std::vector<MotionClass> classes = all_motion_classes();
  int train_clips_per_class = 100;
  int test_clips_per_class = 40;
  int frames = 64;
  int width = 170;
  int height = 128;
  /// Standard deviation of per-pixel sensor noise, in levels.
  double noise = 2.0;
  double gamma_lo = 2.0;
  double gamma_hi = 5.0;
  /// Multiplies each frame's gamma by a factor in [1 - j, 1 + j] (clamped to the valid range).
  double per_frame_jitter = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Normal-brightness render of one clip.
Clip render_clip(MotionClass motion, const SyntheticSpec& spec, std::uint64_t clip_seed);

struct LabeledClip {
  Clip clip;
  std::string label;
  std::uint64_t seed = 0;
  /// Gamma used to darken the clip (the first frame's when jittered).
  double gamma = 1.0;
  Split split = Split::train;
};

/// Renders and darkens one clip.
LabeledClip synthesize_clip(MotionClass motion, const SyntheticSpec& spec, std::uint64_t clip_seed, Split split);

/// Every clip of one split, class-major order. Parallel over clips; output independent of `threads`.
std::vector<LabeledClip> generate_split(const SyntheticSpec& spec, Split split, unsigned threads = 1);

struct ManifestEntry {
  std::string path;
  std::string label;
  std::uint64_t seed = 0;
  double gamma = 1.0;
  Split split = Split::train;
  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  /// Sorted unique labels.
  std::vector<std::string> class_list() const;
  std::vector<ManifestEntry> split(Split which) const;
};

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

/// CSV with header `path,label,seed,gamma,split`.
void write_manifest(const DatasetManifest& manifest, std::ostream& out);
DatasetManifest read_manifest(std::istream& in);
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Writes every clip of both splits as DLV1 under `out_dir` plus `manifest.csv`
/// (paths relative to `out_dir`).
DatasetManifest gen_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir, unsigned threads = 1);

/// Loads every manifest entry of one split (paths resolved against `root`),
/// failing before returning if any clip is unreadable.
std::vector<LabeledClip> load_split(const DatasetManifest& manifest, Split which, const std::filesystem::path& root,
                                    unsigned threads = 1);

}  // namespace darklight
