// SPDX-License-Identifier: Apache-2.0
//
// Dense single-level differential optical flow on luma scaled to [0, 1].
#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "darklight/media.hpp"

namespace darklight {

enum class FlowMethod { lucas_kanade, horn_schunck };

std::string_view to_string(FlowMethod method);
/// Accepts "lk"/"lucas_kanade" and "hs"/"horn_schunck".
FlowMethod parse_flow_method(std::string_view name);

struct FlowParams {
  FlowMethod method = FlowMethod::lucas_kanade;
  int window = 15;
  double hs_alpha = 1.0;
  int hs_iters = 200;

  void validate() const;
  bool operator==(const FlowParams&) const = default;
};

inline constexpr double kLkMinEigenvalue = 1e-6;

struct Gradients {
  Plane ix;
  Plane iy;
  Plane it;
};

/// Luma / 255.
Plane unit_luma(const Frame& frame);

/// Ix, Iy: central differences of the mean of both frames (edge-replicated);
/// It: second minus first.
Gradients gradients(const Plane& first, const Plane& second);
Gradients gradients(const Frame& first, const Frame& second);

/// Windowed least squares per pixel (window clipped at the borders). Pixels
/// whose structure tensor has smallest eigenvalue below kLkMinEigenvalue get
/// zero flow and are marked in low_confidence().
FlowField lucas_kanade(const Frame& first, const Frame& second, int window = 15);
FlowField lucas_kanade(const Gradients& grad, int window);

/// Called with the 1-based iteration number and the current field.
using HornSchunckObserver = std::function<void(int iteration, const Plane& u, const Plane& v)>;

/// Jacobi iteration from zero flow, exactly `iterations` sweeps.
FlowField horn_schunck(const Frame& first, const Frame& second, double alpha = 1.0, int iterations = 200);
FlowField horn_schunck(const Gradients& grad, double alpha, int iterations,
                       const HornSchunckObserver& observer = {});

/// Sum over pixels of (Ix u + Iy v + It)^2.
double brightness_residual(const Gradients& grad, const Plane& u, const Plane& v);

FlowField estimate_flow(const Frame& first, const Frame& second, const FlowParams& params);

/// One field per consecutive pair; pairs touching a blank frame yield a zero
/// field flagged as padding.
std::vector<FlowField> clip_flow(const Clip& clip, const FlowParams& params, unsigned threads = 1);

}  // namespace darklight
