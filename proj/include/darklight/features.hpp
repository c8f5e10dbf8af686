// SPDX-License-Identifier: Apache-2.0
//
// Hand-crafted stream features.
//
// Schemas name their extractor and fix the vector length:
//   app-g<G>            2*G*G   per-cell mean luma, then per-cell mean |temporal difference|
//   hof-g<G>-b<B>       G*G*B   per-cell magnitude-weighted orientation histogram, L1-normalized
//   fused-concat:<s>    2*|s|   concatenation of two <s> vectors
//   fused-min:<s>       |s|     pointwise minimum of two <s> vectors
//   <a>+<b>             |a|+|b| concatenation of different schemas
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "darklight/media.hpp"

namespace darklight {

struct FeatureVector {
  std::vector<double> values;
  std::string schema;

  std::size_t size() const { return values.size(); }
  bool operator==(const FeatureVector&) const = default;
};

std::string appearance_schema(int grid);
std::string hof_schema(int grid, int bins);

/// Vector length implied by a schema; throws PreconditionError on unknown schemas.
std::size_t schema_length(std::string_view schema);

/// Appearance statistics over the non-blank frames of a clip (blank padding
/// frames and transitions into them are skipped).
FeatureVector extract_appearance(const Clip& clip, int grid = 4);

/// Histogram of oriented flow. Bins split [-pi, pi) uniformly; padding fields are skipped.
FeatureVector extract_hof(const std::vector<FlowField>& fields, int grid = 4, int bins = 8);

enum class FusionMode { concat, elementwise_min };

std::string_view to_string(FusionMode mode);
FusionMode parse_fusion_mode(std::string_view name);

/// Combines dark- and light-stream features of the same schema.
FeatureVector fuse(const FeatureVector& dark, const FeatureVector& light, FusionMode mode);

/// Concatenation of two vectors with (possibly) different schemas.
FeatureVector join(const FeatureVector& first, const FeatureVector& second);

}  // namespace darklight
