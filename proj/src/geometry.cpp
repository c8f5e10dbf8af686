// SPDX-License-Identifier: Apache-2.0
#include "darklight/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "darklight/error.hpp"

namespace darklight {

namespace {

Frame copy_window(const Frame& frame, int top, int left, int height, int width) {
  Frame out(width, height);
  auto src = frame.pixels();
  auto dst = out.pixels();
  const std::size_t row_bytes = static_cast<std::size_t>(width) * 3;
  for (int y = 0; y < height; ++y) {
    const std::size_t from = (static_cast<std::size_t>(top + y) * frame.width() + left) * 3;
    std::memcpy(dst.data() + y * row_bytes, src.data() + from, row_bytes);
  }
  return out;
}

Frame centered_square(const Frame& frame, int side, const char* op) {
  if (side < 1) throw PreconditionError(std::string(op) + ": side must be >= 1");
  if (frame.width() < side || frame.height() < side) {
    throw PreconditionError(std::string(op) + ": frame " + std::to_string(frame.width()) + "x" +
                            std::to_string(frame.height()) + " smaller than crop side " + std::to_string(side));
  }
  return copy_window(frame, (frame.height() - side) / 2, (frame.width() - side) / 2, side, side);
}

struct Tap {
  int i0;
  int i1;
  double t;
};

std::vector<Tap> taps(int in, int out) {
  std::vector<Tap> result(out);
  const double ratio = static_cast<double>(in) / out;
  for (int d = 0; d < out; ++d) {
    const double src = std::clamp((d + 0.5) * ratio - 0.5, 0.0, static_cast<double>(in - 1));
    const int i0 = static_cast<int>(std::floor(src));
    const int i1 = std::min(i0 + 1, in - 1);
    result[d] = {i0, i1, src - i0};
  }
  return result;
}

}  // namespace

Frame center_crop(const Frame& frame, int side) { return centered_square(frame, side, "center_crop"); }

Frame maxcenter_crop(const Frame& frame, std::optional<int> side) {
  return centered_square(frame, side.value_or(std::min(frame.width(), frame.height())), "maxcenter_crop");
}

Frame scale_bilinear(const Frame& frame, int out_height, int out_width) {
  if (out_height < 1 || out_width < 1) throw PreconditionError("scale_bilinear: output size must be >= 1");
  if (out_height == frame.height() && out_width == frame.width()) return frame;
  const auto xs = taps(frame.width(), out_width);
  const auto ys = taps(frame.height(), out_height);
  Frame out(out_width, out_height);
  for (int y = 0; y < out_height; ++y) {
    const auto& ty = ys[y];
    for (int x = 0; x < out_width; ++x) {
      const auto& tx = xs[x];
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - tx.t) * frame.at(tx.i0, ty.i0, c) + tx.t * frame.at(tx.i1, ty.i0, c);
        const double bottom = (1.0 - tx.t) * frame.at(tx.i0, ty.i1, c) + tx.t * frame.at(tx.i1, ty.i1, c);
        out.at(x, y, c) = to_channel((1.0 - ty.t) * top + ty.t * bottom);
      }
    }
  }
  return out;
}

std::string_view to_string(CropMode mode) {
  switch (mode) {
    case CropMode::center:
      return "center";
    case CropMode::maxcenter:
      return "maxcenter";
    case CropMode::scale:
      return "scale";
  }
  return "?";
}

CropMode parse_crop_mode(std::string_view name) {
  if (name == "center") return CropMode::center;
  if (name == "maxcenter") return CropMode::maxcenter;
  if (name == "scale" || name == "scaling") return CropMode::scale;
  throw PreconditionError("unknown crop mode '" + std::string(name) + "'");
}

int default_crop_side(CropMode mode) { return mode == CropMode::center ? kCenterCropSide : kMaxcenterSide; }

Frame resize_for_mode(const Frame& frame, CropMode mode, int side) {
  switch (mode) {
    case CropMode::center:
      return center_crop(frame, side);
    case CropMode::maxcenter: {
      Frame square = maxcenter_crop(frame);
      return square.width() == side ? square : scale_bilinear(square, side, side);
    }
    case CropMode::scale:
      return scale_bilinear(frame, side, side);
  }
  throw PreconditionError("invalid crop mode");
}

Clip resize_for_mode(const Clip& clip, CropMode mode, int side) {
  std::vector<Frame> frames;
  frames.reserve(clip.size());
  for (const auto& f : clip.frames()) frames.push_back(resize_for_mode(f, mode, side));
  return Clip(std::move(frames), clip.label());
}

}  // namespace darklight
