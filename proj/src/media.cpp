// SPDX-License-Identifier: Apache-2.0
#include "darklight/media.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include "darklight/error.hpp"

namespace darklight {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary codecs assume a little-endian host");

void check_dimensions(int width, int height, const char* what) {
  if (width < 1 || height < 1) {
    throw PreconditionError(std::string(what) + ": dimensions must be at least 1x1");
  }
}

template <typename T>
void put_le(std::string& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.append(raw, sizeof(T));
}

/// Cursor over an input buffer that raises FormatError on overrun.
class Reader {
 public:
  Reader(std::string_view bytes, const char* format) : bytes_(bytes), format_(format) {}

  template <typename T>
  T get_le(const char* what) {
    T value;
    std::memcpy(&value, take(sizeof(T), what).data(), sizeof(T));
    return value;
  }

  std::string_view take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) fail(std::string("truncated ") + what);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw FormatError(std::string(format_) + ": " + message);
  }

 private:
  std::string_view bytes_;
  const char* format_;
  std::size_t pos_ = 0;
};

}  // namespace

Frame::Frame(int width, int height) : width_(width), height_(height) {
  check_dimensions(width, height, "Frame");
  pixels_.assign(pixel_count() * 3, 0);
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dimensions(width, height, "Frame");
  if (pixels_.size() != pixel_count() * 3) {
    throw PreconditionError("Frame: pixel buffer length does not match width*height*3");
  }
}

Clip::Clip(std::vector<Frame> frames, std::optional<std::string> label) : frames_(std::move(frames)) {
  if (frames_.empty()) throw PreconditionError("Clip: at least one frame required");
  for (const auto& f : frames_) {
    if (f.width() != frames_.front().width() || f.height() != frames_.front().height()) {
      throw PreconditionError("Clip: frames differ in dimensions");
    }
  }
  set_label(std::move(label));
}

void Clip::set_label(std::optional<std::string> label) {
  if (label && label->size() > 255) throw PreconditionError("Clip: label longer than 255 bytes");
  if (label && label->empty()) label.reset();
  label_ = std::move(label);
}

FlowField::FlowField(int width, int height) : width_(width), height_(height) {
  check_dimensions(width, height, "FlowField");
  vectors_.assign(static_cast<std::size_t>(width) * height, FlowVector{});
}

FlowField::FlowField(int width, int height, std::vector<FlowVector> vectors)
    : width_(width), height_(height), vectors_(std::move(vectors)) {
  check_dimensions(width, height, "FlowField");
  if (vectors_.size() != static_cast<std::size_t>(width) * height) {
    throw PreconditionError("FlowField: vector count does not match width*height");
  }
  for (const auto& v : vectors_) {
    if (!std::isfinite(v.u) || !std::isfinite(v.v)) {
      throw PreconditionError("FlowField: non-finite component");
    }
  }
}

void FlowField::set(int x, int y, FlowVector value) {
  if (!std::isfinite(value.u) || !std::isfinite(value.v)) {
    throw PreconditionError("FlowField: non-finite component");
  }
  vectors_[static_cast<std::size_t>(y) * width_ + x] = value;
}

void FlowField::set_low_confidence(std::vector<std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != vectors_.size()) {
    throw PreconditionError("FlowField: mask size mismatch");
  }
  low_confidence_ = std::move(mask);
}

std::uint8_t to_channel(double value) {
  const double r = std::round(value);
  if (!(r > 0.0)) return 0;  // also maps NaN to 0
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

Plane luma(const Frame& frame) {
  Plane out(frame.width(), frame.height());
  auto px = frame.pixels();
  for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
    out.values[i] = luma_of(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
  }
  return out;
}

double mean_luma(const Frame& frame) {
  auto px = frame.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
    sum += luma_of(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
  }
  return sum / static_cast<double>(frame.pixel_count());
}

double mean_luma(const Clip& clip) {
  double sum = 0.0;
  for (const auto& f : clip.frames()) sum += mean_luma(f);
  return sum / static_cast<double>(clip.size());
}

bool is_blank(const Frame& frame) {
  auto px = frame.pixels();
  return std::all_of(px.begin(), px.end(), [](std::uint8_t v) { return v == 0; });
}

HistogramRGB histogram(const Frame& frame) {
  HistogramRGB hist;
  auto px = frame.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) ++hist.bins[i % 3][px[i]];
  return hist;
}

void write_histogram_csv(const HistogramRGB& hist, std::ostream& out) {
  static constexpr char kNames[3] = {'R', 'G', 'B'};
  out << "channel,value,count\n";
  for (int c = 0; c < 3; ++c) {
    for (int v = 0; v < 256; ++v) out << kNames[c] << ',' << v << ',' << hist.bins[c][v] << '\n';
  }
}

// ---------------------------------------------------------------------------
// PPM

std::string encode_ppm(const Frame& frame) {
  std::string out = "P6\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
  auto px = frame.pixels();
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

Frame decode_ppm(std::string_view bytes) {
  std::size_t pos = 0;
  auto malformed = [] [[noreturn]] (const char* why) {
    throw FormatError(std::string("PPM: malformed header (") + why + ")");
  };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* field) -> long {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) malformed(field);
    long value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1'000'000) malformed(field);
      ++pos;
    }
    return value;
  };

  if (bytes.size() < 2 || bytes.substr(0, 2) != "P6") malformed("magic");
  pos = 2;
  const long width = read_uint("width");
  const long height = read_uint("height");
  const long maxval = read_uint("maxval");
  if (width < 1 || height < 1) malformed("zero dimension");
  if (maxval != 255) throw FormatError("PPM: unsupported maxval " + std::to_string(maxval));
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) malformed("separator");
  ++pos;

  const std::size_t need = static_cast<std::size_t>(width) * height * 3;
  if (bytes.size() - pos < need) throw FormatError("PPM: truncated pixel data");
  if (bytes.size() - pos > need) throw FormatError("PPM: trailing bytes after pixel data");
  std::vector<std::uint8_t> px(need);
  std::memcpy(px.data(), bytes.data() + pos, need);
  return Frame(static_cast<int>(width), static_cast<int>(height), std::move(px));
}

Frame load_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }
void save_ppm(const Frame& frame, const std::filesystem::path& path) { write_file(path, encode_ppm(frame)); }

// ---------------------------------------------------------------------------
// DLV1 clip container

std::string encode_clip(const Clip& clip) {
  std::string out = "DLV1";
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.height()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.width()));
  const std::string label = clip.label().value_or("");
  out.push_back(static_cast<char>(static_cast<std::uint8_t>(label.size())));
  out += label;
  for (const auto& f : clip.frames()) {
    out.append(reinterpret_cast<const char*>(f.pixels().data()), f.pixels().size());
  }
  return out;
}

Clip decode_clip(std::string_view bytes) {
  Reader in(bytes, "DLV1");
  if (in.take(bytes.size() < 4 ? bytes.size() : 4, "magic") != "DLV1") in.fail("bad magic");
  const auto n = in.get_le<std::uint32_t>("header");
  const auto h = in.get_le<std::uint32_t>("header");
  const auto w = in.get_le<std::uint32_t>("header");
  if (n == 0 || h == 0 || w == 0) in.fail("zero dimension in header");
  if (h > 1u << 15 || w > 1u << 15) in.fail("dimension mismatch: implausible frame size");
  const auto label_len = in.get_le<std::uint8_t>("label block");
  std::optional<std::string> label;
  if (label_len > 0) label = std::string(in.take(label_len, "label block"));

  const std::size_t frame_bytes = static_cast<std::size_t>(h) * w * 3;
  if (in.remaining() / frame_bytes < n) in.fail("truncated pixel data");
  if (in.remaining() != frame_bytes * n) in.fail("dimension mismatch: payload size disagrees with header");
  std::vector<Frame> frames;
  frames.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    auto raw = in.take(frame_bytes, "pixel data");
    std::vector<std::uint8_t> px(raw.begin(), raw.end());
    frames.emplace_back(static_cast<int>(w), static_cast<int>(h), std::move(px));
  }
  return Clip(std::move(frames), std::move(label));
}

Clip load_clip(const std::filesystem::path& path) { return decode_clip(read_file(path)); }
void save_clip(const Clip& clip, const std::filesystem::path& path) { write_file(path, encode_clip(clip)); }

// ---------------------------------------------------------------------------
// PIEH flow

std::string encode_flow(const FlowField& flow) {
  std::string out = "PIEH";
  put_le<std::int32_t>(out, flow.width());
  put_le<std::int32_t>(out, flow.height());
  out.reserve(out.size() + flow.vectors().size() * 8);
  for (const auto& v : flow.vectors()) {
    put_le<float>(out, v.u);
    put_le<float>(out, v.v);
  }
  return out;
}

FlowField decode_flow(std::string_view bytes) {
  Reader in(bytes, "PIEH");
  if (in.take(bytes.size() < 4 ? bytes.size() : 4, "magic") != "PIEH") in.fail("bad magic");
  const auto w = in.get_le<std::int32_t>("header");
  const auto h = in.get_le<std::int32_t>("header");
  if (w < 1 || h < 1 || w > 1 << 15 || h > 1 << 15) in.fail("invalid dimensions");
  const std::size_t count = static_cast<std::size_t>(w) * h;
  if (in.remaining() != count * 8) in.fail(in.remaining() < count * 8 ? "truncated vector data" : "trailing bytes");
  std::vector<FlowVector> vectors(count);
  for (auto& v : vectors) {
    v.u = in.get_le<float>("vector data");
    v.v = in.get_le<float>("vector data");
    if (!std::isfinite(v.u) || !std::isfinite(v.v)) in.fail("non-finite flow component");
  }
  return FlowField(w, h, std::move(vectors));
}

FlowField load_flow(const std::filesystem::path& path) { return decode_flow(read_file(path)); }
void save_flow(const FlowField& flow, const std::filesystem::path& path) { write_file(path, encode_flow(flow)); }

// ---------------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace darklight
