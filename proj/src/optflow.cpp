// SPDX-License-Identifier: Apache-2.0
#include "darklight/optflow.hpp"

#include <algorithm>
#include <cmath>

#include "darklight/error.hpp"
#include "darklight/parallel.hpp"

namespace darklight {

namespace {

/// Summed-area table with one row/column of leading zeros.
class Integral {
 public:
  explicit Integral(const Plane& p) : w_(p.width + 1), sums_(static_cast<std::size_t>(p.width + 1) * (p.height + 1)) {
    for (int y = 0; y < p.height; ++y) {
      double row = 0.0;
      for (int x = 0; x < p.width; ++x) {
        row += p.at(x, y);
        sums_[idx(x + 1, y + 1)] = sums_[idx(x + 1, y)] + row;
      }
    }
  }

  /// Sum over [x0, x1) x [y0, y1).
  double box(int x0, int y0, int x1, int y1) const {
    return sums_[idx(x1, y1)] - sums_[idx(x0, y1)] - sums_[idx(x1, y0)] + sums_[idx(x0, y0)];
  }

 private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * w_ + x; }
  int w_;
  std::vector<double> sums_;
};

Plane product(const Plane& a, const Plane& b) {
  Plane out(a.width, a.height);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

void neighbor_average(const Plane& in, Plane& out) {
  const int w = in.width;
  const int h = in.height;
  for (int y = 0; y < h; ++y) {
    const int up = y > 0 ? y - 1 : 0;
    const int down = y + 1 < h ? y + 1 : h - 1;
    for (int x = 0; x < w; ++x) {
      const int left = x > 0 ? x - 1 : 0;
      const int right = x + 1 < w ? x + 1 : w - 1;
      out.at(x, y) = 0.25 * (in.at(left, y) + in.at(right, y) + in.at(x, up) + in.at(x, down));
    }
  }
}

FlowField to_field(const Plane& u, const Plane& v) {
  std::vector<FlowVector> vectors(u.values.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    vectors[i] = {static_cast<float>(u.values[i]), static_cast<float>(v.values[i])};
  }
  return FlowField(u.width, u.height, std::move(vectors));
}

}  // namespace

std::string_view to_string(FlowMethod method) {
  return method == FlowMethod::lucas_kanade ? "lk" : "hs";
}

FlowMethod parse_flow_method(std::string_view name) {
  if (name == "lk" || name == "lucas_kanade") return FlowMethod::lucas_kanade;
  if (name == "hs" || name == "horn_schunck") return FlowMethod::horn_schunck;
  throw PreconditionError("unknown flow method '" + std::string(name) + "'");
}

void FlowParams::validate() const {
  if (window < 3 || window % 2 == 0) throw PreconditionError("flow: window must be odd and >= 3");
  if (!(hs_alpha > 0.0) || !std::isfinite(hs_alpha)) throw PreconditionError("flow: hs_alpha must be > 0");
  if (hs_iters < 1) throw PreconditionError("flow: hs_iters must be >= 1");
}

Plane unit_luma(const Frame& frame) {
  Plane p = luma(frame);
  for (auto& v : p.values) v /= kChannelMax;
  return p;
}

Gradients gradients(const Plane& first, const Plane& second) {
  if (first.width != second.width || first.height != second.height) {
    throw PreconditionError("gradients: frame dimensions differ");
  }
  const int w = first.width;
  const int h = first.height;
  Plane avg(w, h);
  for (std::size_t i = 0; i < avg.values.size(); ++i) avg.values[i] = 0.5 * (first.values[i] + second.values[i]);

  Gradients g{Plane(w, h), Plane(w, h), Plane(w, h)};
  for (int y = 0; y < h; ++y) {
    const int up = y > 0 ? y - 1 : 0;
    const int down = y + 1 < h ? y + 1 : h - 1;
    for (int x = 0; x < w; ++x) {
      const int left = x > 0 ? x - 1 : 0;
      const int right = x + 1 < w ? x + 1 : w - 1;
      g.ix.at(x, y) = 0.5 * (avg.at(right, y) - avg.at(left, y));
      g.iy.at(x, y) = 0.5 * (avg.at(x, down) - avg.at(x, up));
      g.it.at(x, y) = second.at(x, y) - first.at(x, y);
    }
  }
  return g;
}

Gradients gradients(const Frame& first, const Frame& second) {
  if (first.width() != second.width() || first.height() != second.height()) {
    throw PreconditionError("gradients: frame dimensions differ");
  }
  return gradients(unit_luma(first), unit_luma(second));
}

FlowField lucas_kanade(const Gradients& grad, int window) {
  if (window < 3 || window % 2 == 0) throw PreconditionError("lucas_kanade: window must be odd and >= 3");
  const int w = grad.ix.width;
  const int h = grad.ix.height;
  const Integral sxx(product(grad.ix, grad.ix));
  const Integral sxy(product(grad.ix, grad.iy));
  const Integral syy(product(grad.iy, grad.iy));
  const Integral sxt(product(grad.ix, grad.it));
  const Integral syt(product(grad.iy, grad.it));

  const int r = window / 2;
  std::vector<FlowVector> vectors(static_cast<std::size_t>(w) * h);
  std::vector<std::uint8_t> low(vectors.size(), 0);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - r);
    const int y1 = std::min(h, y + r + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - r);
      const int x1 = std::min(w, x + r + 1);
      const double a = sxx.box(x0, y0, x1, y1);
      const double b = sxy.box(x0, y0, x1, y1);
      const double c = syy.box(x0, y0, x1, y1);
      const double min_eig = 0.5 * (a + c - std::sqrt((a - c) * (a - c) + 4.0 * b * b));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (!(min_eig >= kLkMinEigenvalue)) {
        low[i] = 1;
        continue;
      }
      const double bx = -sxt.box(x0, y0, x1, y1);
      const double by = -syt.box(x0, y0, x1, y1);
      const double det = a * c - b * b;
      vectors[i] = {static_cast<float>((c * bx - b * by) / det), static_cast<float>((a * by - b * bx) / det)};
    }
  }
  FlowField field(w, h, std::move(vectors));
  field.set_low_confidence(std::move(low));
  return field;
}

FlowField lucas_kanade(const Frame& first, const Frame& second, int window) {
  return lucas_kanade(gradients(first, second), window);
}

FlowField horn_schunck(const Gradients& grad, double alpha, int iterations, const HornSchunckObserver& observer) {
  if (!(alpha > 0.0)) throw PreconditionError("horn_schunck: alpha must be > 0");
  if (iterations < 1) throw PreconditionError("horn_schunck: iterations must be >= 1");
  const int w = grad.ix.width;
  const int h = grad.ix.height;
  Plane u(w, h), v(w, h), u_avg(w, h), v_avg(w, h);
  const double alpha2 = alpha * alpha;
  for (int it = 1; it <= iterations; ++it) {
    neighbor_average(u, u_avg);
    neighbor_average(v, v_avg);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      const double ix = grad.ix.values[i];
      const double iy = grad.iy.values[i];
      const double k = (ix * u_avg.values[i] + iy * v_avg.values[i] + grad.it.values[i]) / (alpha2 + ix * ix + iy * iy);
      u.values[i] = u_avg.values[i] - ix * k;
      v.values[i] = v_avg.values[i] - iy * k;
    }
    if (observer) observer(it, u, v);
  }
  return to_field(u, v);
}

FlowField horn_schunck(const Frame& first, const Frame& second, double alpha, int iterations) {
  return horn_schunck(gradients(first, second), alpha, iterations);
}

double brightness_residual(const Gradients& grad, const Plane& u, const Plane& v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double r = grad.ix.values[i] * u.values[i] + grad.iy.values[i] * v.values[i] + grad.it.values[i];
    sum += r * r;
  }
  return sum;
}

FlowField estimate_flow(const Frame& first, const Frame& second, const FlowParams& params) {
  params.validate();
  const auto grad = gradients(first, second);
  if (params.method == FlowMethod::lucas_kanade) return lucas_kanade(grad, params.window);
  return horn_schunck(grad, params.hs_alpha, params.hs_iters);
}

std::vector<FlowField> clip_flow(const Clip& clip, const FlowParams& params, unsigned threads) {
  params.validate();
  if (clip.size() < 2) throw PreconditionError("clip_flow: need at least two frames");
  std::vector<std::uint8_t> blank(clip.size());
  for (std::size_t i = 0; i < clip.size(); ++i) blank[i] = is_blank(clip[i]) ? 1 : 0;

  std::vector<FlowField> fields(clip.size() - 1, FlowField(clip.width(), clip.height()));
  parallel_for(fields.size(), threads, [&](std::size_t i) {
    if (blank[i] || blank[i + 1]) {
      fields[i].set_padding(true);
      return;
    }
    fields[i] = estimate_flow(clip[i], clip[i + 1], params);
  });
  return fields;
}

}  // namespace darklight
