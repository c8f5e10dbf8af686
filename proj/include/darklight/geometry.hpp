// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "darklight/media.hpp"

namespace darklight {

inline constexpr int kCenterCropSide = 112;
inline constexpr int kMaxcenterSide = 128;

/// Centered side x side window; odd margins put the extra pixel bottom/right.
Frame center_crop(const Frame& frame, int side = kCenterCropSide);

/// Centered square window; `side` defaults to the shorter image dimension,
/// which is the full-height 128x128 square of a 170x128 frame.
Frame maxcenter_crop(const Frame& frame, std::optional<int> side = std::nullopt);

/// Bilinear resampling with half-pixel centers, src = (dst + 0.5) * in / out - 0.5,
/// clamped at the edges.
Frame scale_bilinear(const Frame& frame, int out_height, int out_width);

enum class CropMode { center, maxcenter, scale };

std::string_view to_string(CropMode mode);
CropMode parse_crop_mode(std::string_view name);

/// Default output side for each mode: 112 for center, 128 otherwise.
int default_crop_side(CropMode mode);

/// The pipeline's resize stage, always producing side x side:
///  - center: center_crop(side)
///  - maxcenter: largest centered square, rescaled only when it is not already side x side
///  - scale: scale_bilinear to side x side
Frame resize_for_mode(const Frame& frame, CropMode mode, int side);
Clip resize_for_mode(const Clip& clip, CropMode mode, int side);

}  // namespace darklight
