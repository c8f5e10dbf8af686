// SPDX-License-Identifier: Apache-2.0
//
// Delta sampling: stride S = min(omega + delta, sigma) with delta drawn once
// per clip from [alpha, beta]; the kept frames are wrapped in blank (all-zero)
// frames so the output always holds floor(N / omega) frames.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "darklight/media.hpp"
#include "darklight/rng.hpp"

namespace darklight {

struct SamplingParams {
  int omega = 4;
  int alpha = 0;
  int beta = 0;
  int sigma = 4;

  /// Throws PreconditionError unless 0 <= alpha <= beta, omega >= 1, sigma >= omega.
  void validate() const;
  bool operator==(const SamplingParams&) const = default;
};

struct SamplePlan {
  std::uint64_t seed = 0;
  int delta = 0;
  int stride = 1;
  int pad_before = 0;
  int pad_after = 0;
  std::vector<std::size_t> kept_indices;

  std::size_t output_length() const { return pad_before + kept_indices.size() + pad_after; }
  bool operator==(const SamplePlan&) const = default;
};

int draw_delta(Rng& rng, const SamplingParams& params);
int effective_stride(const SamplingParams& params, int delta);

/// Returns (pad_before, pad_after): pad_before uniform on [0, L - K] with
/// L = floor(N / omega), K = floor(N / stride), and pad_after = L - K - pad_before.
std::pair<int, int> pad_layout(Rng& rng, std::size_t frame_count, int omega, int stride);

/// Draws a plan for a clip of `frame_count` frames. Draw order: delta, then pad_before.
SamplePlan plan_delta_sample(std::size_t frame_count, const SamplingParams& params, Rng& rng);

/// Materializes a plan against a clip.
Clip apply_plan(const Clip& clip, const SamplePlan& plan);

struct SampleResult {
  Clip clip;
  SamplePlan plan;
};

SampleResult delta_sample(const Clip& clip, const SamplingParams& params, Rng& rng);

/// CSV header and row for plan dumps: clip_id,seed,delta,S,p1,p2,kept_indices
/// (kept indices separated by ';').
void write_plan_csv_header(std::ostream& out);
void write_plan_csv_row(std::ostream& out, const std::string& clip_id, const SamplePlan& plan);

}  // namespace darklight
