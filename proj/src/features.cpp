// SPDX-License-Identifier: Apache-2.0
#include "darklight/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "darklight/error.hpp"
#include "text.hpp"

namespace darklight {

namespace {

void check_grid(int grid, int width, int height) {
  if (grid < 1) throw PreconditionError("feature grid must be >= 1");
  if (grid > width || grid > height) throw PreconditionError("feature grid finer than the frame");
}

/// Cell index of each pixel for a grid x grid partition with floor boundaries.
std::vector<int> cell_map(int width, int height, int grid) {
  std::vector<int> cells(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const int cy = y * grid / height;
    for (int x = 0; x < width; ++x) cells[static_cast<std::size_t>(y) * width + x] = cy * grid + x * grid / width;
  }
  return cells;
}

std::size_t parse_suffix(std::string_view s, std::string_view prefix, std::string_view schema) {
  if (s.substr(0, prefix.size()) != prefix) throw PreconditionError("unknown feature schema '" + std::string(schema) + "'");
  const auto v = text::parse_int<int>(s.substr(prefix.size()), schema);
  if (v < 1) throw PreconditionError("invalid feature schema '" + std::string(schema) + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string appearance_schema(int grid) { return "app-g" + std::to_string(grid); }
std::string hof_schema(int grid, int bins) { return "hof-g" + std::to_string(grid) + "-b" + std::to_string(bins); }

std::size_t schema_length(std::string_view schema) {
  // '+' binds loosest, and only the fused forms contain ':'.
  if (const auto plus = schema.find('+'); plus != std::string_view::npos) {
    return schema_length(schema.substr(0, plus)) + schema_length(schema.substr(plus + 1));
  }
  if (schema.starts_with("fused-concat:")) return 2 * schema_length(schema.substr(13));
  if (schema.starts_with("fused-min:")) return schema_length(schema.substr(10));
  try {
    if (schema.starts_with("app-g")) {
      const auto g = parse_suffix(schema, "app-g", schema);
      return 2 * g * g;
    }
    if (schema.starts_with("hof-g")) {
      const auto dash = schema.find("-b", 5);
      if (dash == std::string_view::npos) throw PreconditionError("");
      const auto g = parse_suffix(schema.substr(0, dash), "hof-g", schema);
      const auto b = parse_suffix(schema.substr(dash), "-b", schema);
      return g * g * b;
    }
  } catch (const Error&) {
  }
  throw PreconditionError("unknown feature schema '" + std::string(schema) + "'");
}

FeatureVector extract_appearance(const Clip& clip, int grid) {
  const int w = clip.width();
  const int h = clip.height();
  check_grid(grid, w, h);
  const std::size_t cells = static_cast<std::size_t>(grid) * grid;
  const auto cell_of = cell_map(w, h, grid);
  std::vector<double> cell_pixels(cells, 0.0);
  for (int c : cell_of) cell_pixels[c] += 1.0;

  FeatureVector out{std::vector<double>(2 * cells, 0.0), appearance_schema(grid)};
  std::vector<double> acc(cells);
  std::size_t lit_frames = 0;
  std::size_t diff_pairs = 0;
  Plane previous;
  bool previous_lit = false;
  for (const auto& frame : clip.frames()) {
    const bool lit = !is_blank(frame);
    Plane y;
    if (lit) {
      y = luma(frame);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i = 0; i < y.values.size(); ++i) acc[cell_of[i]] += y.values[i];
      for (std::size_t c = 0; c < cells; ++c) out.values[c] += acc[c] / cell_pixels[c] / kChannelMax;
      ++lit_frames;
      if (previous_lit) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t i = 0; i < y.values.size(); ++i) acc[cell_of[i]] += std::abs(y.values[i] - previous.values[i]);
        for (std::size_t c = 0; c < cells; ++c) out.values[cells + c] += acc[c] / cell_pixels[c] / kChannelMax;
        ++diff_pairs;
      }
    }
    previous = std::move(y);
    previous_lit = lit;
  }
  if (lit_frames > 0) {
    for (std::size_t c = 0; c < cells; ++c) out.values[c] /= static_cast<double>(lit_frames);
  }
  if (diff_pairs > 0) {
    for (std::size_t c = 0; c < cells; ++c) out.values[cells + c] /= static_cast<double>(diff_pairs);
  }
  for (auto& v : out.values) v = std::clamp(v, 0.0, 1.0);
  return out;
}

FeatureVector extract_hof(const std::vector<FlowField>& fields, int grid, int bins) {
  if (fields.empty()) throw PreconditionError("extract_hof: need at least one flow field");
  if (bins < 1) throw PreconditionError("extract_hof: bins must be >= 1");
  const int w = fields.front().width();
  const int h = fields.front().height();
  check_grid(grid, w, h);
  const std::size_t cells = static_cast<std::size_t>(grid) * grid;
  const auto cell_of = cell_map(w, h, grid);

  FeatureVector out{std::vector<double>(cells * bins, 0.0), hof_schema(grid, bins)};
  for (const auto& field : fields) {
    if (field.width() != w || field.height() != h) throw PreconditionError("extract_hof: field dimensions differ");
    if (field.is_padding()) continue;
    const auto& vec = field.vectors();
    for (std::size_t i = 0; i < vec.size(); ++i) {
      const double u = vec[i].u;
      const double v = vec[i].v;
      const double mag = std::hypot(u, v);
      if (mag == 0.0) continue;
      const double turn = std::atan2(v, u) / (2.0 * std::numbers::pi) + 0.5;  // [0, 1]
      int bin = static_cast<int>(std::floor(turn * bins));
      if (bin >= bins) bin = 0;  // atan2 == pi is the same direction as -pi
      out.values[cell_of[i] * bins + bin] += mag;
    }
  }
  for (std::size_t c = 0; c < cells; ++c) {
    double total = 0.0;
    for (int b = 0; b < bins; ++b) total += out.values[c * bins + b];
    if (total == 0.0) continue;
    for (int b = 0; b < bins; ++b) out.values[c * bins + b] /= total;
  }
  return out;
}

std::string_view to_string(FusionMode mode) { return mode == FusionMode::concat ? "concat" : "elementwise_min"; }

FusionMode parse_fusion_mode(std::string_view name) {
  if (name == "concat") return FusionMode::concat;
  if (name == "elementwise_min" || name == "min") return FusionMode::elementwise_min;
  throw PreconditionError("unknown fusion mode '" + std::string(name) + "'");
}

FeatureVector fuse(const FeatureVector& dark, const FeatureVector& light, FusionMode mode) {
  if (dark.schema != light.schema || dark.size() != light.size()) {
    throw PreconditionError("fuse: schema mismatch ('" + dark.schema + "' vs '" + light.schema + "')");
  }
  FeatureVector out;
  if (mode == FusionMode::concat) {
    out.schema = "fused-concat:" + dark.schema;
    out.values = dark.values;
    out.values.insert(out.values.end(), light.values.begin(), light.values.end());
  } else {
    out.schema = "fused-min:" + dark.schema;
    out.values.resize(dark.size());
    for (std::size_t i = 0; i < dark.size(); ++i) out.values[i] = std::min(dark.values[i], light.values[i]);
  }
  return out;
}

FeatureVector join(const FeatureVector& first, const FeatureVector& second) {
  FeatureVector out{first.values, first.schema + "+" + second.schema};
  out.values.insert(out.values.end(), second.values.begin(), second.values.end());
  return out;
}

}  // namespace darklight
