// SPDX-License-Identifier: Apache-2.0
#include "darklight/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <tuple>

#include "darklight/error.hpp"

namespace darklight {

void SamplingParams::validate() const {
  if (omega < 1) throw PreconditionError("sampling: omega must be >= 1");
  if (alpha < 0 || alpha > beta) throw PreconditionError("sampling: need 0 <= alpha <= beta");
  if (sigma < omega) throw PreconditionError("sampling: sigma must be >= omega");
}

int draw_delta(Rng& rng, const SamplingParams& params) {
  params.validate();
  return static_cast<int>(rng.uniform_int(params.alpha, params.beta));
}

int effective_stride(const SamplingParams& params, int delta) {
  params.validate();
  if (delta < params.alpha || delta > params.beta) throw PreconditionError("sampling: delta outside [alpha, beta]");
  return std::min(params.omega + delta, params.sigma);
}

std::pair<int, int> pad_layout(Rng& rng, std::size_t frame_count, int omega, int stride) {
  if (omega < 1 || stride < omega) throw PreconditionError("pad_layout: need stride >= omega >= 1");
  if (frame_count < static_cast<std::size_t>(stride)) throw PreconditionError("pad_layout: need N >= stride");
  const auto total = static_cast<std::int64_t>(frame_count / omega);
  const auto kept = static_cast<std::int64_t>(frame_count / stride);
  assert(total >= kept);
  const auto before = rng.uniform_int(0, total - kept);
  return {static_cast<int>(before), static_cast<int>(total - kept - before)};
}

SamplePlan plan_delta_sample(std::size_t frame_count, const SamplingParams& params, Rng& rng) {
  params.validate();
  if (frame_count < static_cast<std::size_t>(params.sigma)) {
    throw PreconditionError("clip too short for sampling params");
  }
  SamplePlan plan;
  plan.seed = rng.seed();
  plan.delta = draw_delta(rng, params);
  plan.stride = effective_stride(params, plan.delta);
  std::tie(plan.pad_before, plan.pad_after) = pad_layout(rng, frame_count, params.omega, plan.stride);
  const std::size_t kept = frame_count / plan.stride;
  plan.kept_indices.resize(kept);
  for (std::size_t k = 0; k < kept; ++k) plan.kept_indices[k] = k * plan.stride;
  return plan;
}

Clip apply_plan(const Clip& clip, const SamplePlan& plan) {
  const Frame blank(clip.width(), clip.height());
  std::vector<Frame> out;
  out.reserve(plan.output_length());
  out.insert(out.end(), plan.pad_before, blank);
  for (auto idx : plan.kept_indices) {
    if (idx >= clip.size()) throw PreconditionError("sample plan index beyond clip length");
    out.push_back(clip[idx]);
  }
  out.insert(out.end(), plan.pad_after, blank);
  return Clip(std::move(out), clip.label());
}

SampleResult delta_sample(const Clip& clip, const SamplingParams& params, Rng& rng) {
  auto plan = plan_delta_sample(clip.size(), params, rng);
  auto sampled = apply_plan(clip, plan);
  return {std::move(sampled), std::move(plan)};
}

void write_plan_csv_header(std::ostream& out) { out << "clip_id,seed,delta,S,p1,p2,kept_indices\n"; }

void write_plan_csv_row(std::ostream& out, const std::string& clip_id, const SamplePlan& plan) {
  out << clip_id << ',' << plan.seed << ',' << plan.delta << ',' << plan.stride << ',' << plan.pad_before << ','
      << plan.pad_after << ',';
  for (std::size_t i = 0; i < plan.kept_indices.size(); ++i) {
    if (i) out << ';';
    out << plan.kept_indices[i];
  }
  out << '\n';
}

}  // namespace darklight
