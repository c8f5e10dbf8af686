// SPDX-License-Identifier: Apache-2.0
//
// Frames, clips, histograms and flow fields, plus their on-disk formats:
//
//   PPM   binary P6, maxval 255
//   DLV1  "DLV1" | u32le N | u32le H | u32le W | u8 L | L label bytes |
//         N*H*W*3 RGB bytes, frames in order (L = 0 means unlabeled)
//   PIEH  "PIEH" | i32le width | i32le height | (u, v) f32le pairs, row-major
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace darklight {

inline constexpr double kChannelMax = 255.0;

/// One RGB image with interleaved 8-bit channels, row-major.
class Frame {
 public:
  /// All-black frame.
  Frame(int width, int height);
  Frame(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  std::uint8_t at(int x, int y, int c) const { return pixels_[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c) { return pixels_[index(x, y, c)]; }

  bool operator==(const Frame&) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3 + c;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// Non-empty frame sequence with uniform dimensions.
class Clip {
 public:
  explicit Clip(std::vector<Frame> frames, std::optional<std::string> label = std::nullopt);

  std::size_t size() const { return frames_.size(); }
  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }
  const std::vector<Frame>& frames() const { return frames_; }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  const std::optional<std::string>& label() const { return label_; }
  void set_label(std::optional<std::string> label);

  bool operator==(const Clip&) const = default;

 private:
  std::vector<Frame> frames_;
  std::optional<std::string> label_;
};

struct HistogramRGB {
  std::array<std::array<std::uint64_t, 256>, 3> bins{};
};

/// Real-valued single-channel image.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

struct FlowVector {
  float u = 0.0f;
  float v = 0.0f;
  bool operator==(const FlowVector&) const = default;
};

/// Per-pixel displacement field. Components are always finite.
class FlowField {
 public:
  /// Zero field.
  FlowField(int width, int height);
  FlowField(int width, int height, std::vector<FlowVector> vectors);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<FlowVector>& vectors() const { return vectors_; }
  const FlowVector& at(int x, int y) const { return vectors_[static_cast<std::size_t>(y) * width_ + x]; }
  void set(int x, int y, FlowVector value);

  /// Field produced for a pair that touches a blank padding frame.
  bool is_padding() const { return padding_; }
  void set_padding(bool padding) { padding_ = padding; }

  /// Per-pixel flag set by estimators that can reject pixels (empty when not tracked).
  const std::vector<std::uint8_t>& low_confidence() const { return low_confidence_; }
  void set_low_confidence(std::vector<std::uint8_t> mask);

  /// Equality on dimensions and vectors; the padding flag and mask are metadata.
  bool operator==(const FlowField& other) const {
    return width_ == other.width_ && height_ == other.height_ && vectors_ == other.vectors_;
  }

 private:
  int width_;
  int height_;
  std::vector<FlowVector> vectors_;
  bool padding_ = false;
  std::vector<std::uint8_t> low_confidence_;
};

/// Round half away from zero, then clamp to [0, 255].
std::uint8_t to_channel(double value);

inline double luma_of(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

/// Rec.601 luma per pixel, in [0, 255].
Plane luma(const Frame& frame);
double mean_luma(const Frame& frame);
double mean_luma(const Clip& clip);

/// True when every channel of every pixel is zero.
bool is_blank(const Frame& frame);

HistogramRGB histogram(const Frame& frame);
/// Writes `channel,value,count` rows (with header), channels named R, G, B.
void write_histogram_csv(const HistogramRGB& hist, std::ostream& out);

std::string encode_ppm(const Frame& frame);
Frame decode_ppm(std::string_view bytes);
Frame load_ppm(const std::filesystem::path& path);
void save_ppm(const Frame& frame, const std::filesystem::path& path);

std::string encode_clip(const Clip& clip);
Clip decode_clip(std::string_view bytes);
Clip load_clip(const std::filesystem::path& path);
void save_clip(const Clip& clip, const std::filesystem::path& path);

std::string encode_flow(const FlowField& flow);
FlowField decode_flow(std::string_view bytes);
FlowField load_flow(const std::filesystem::path& path);
void save_flow(const FlowField& flow, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace darklight
