// Predictive-entropy uncertainty and per-part uncertainty weights.
#pragma once

#include <span>
#include <vector>

#include "fus/core.hpp"

namespace fus {

/// Normalized entropy per pixel, each value in [0, 1].
struct UncertaintyMap : Raster<double> {
  using Raster<double>::Raster;
};

/// Per-part weight vectors indexed by part id; index 0 unused.
struct PartWeights {
  std::vector<std::vector<double>> parts;
};

/// Entropy of the K-inference mean, natural log, divided by log(C).
/// Requires C >= 2.
UncertaintyMap predictive_entropy(const ProbabilityStack& stack);
UncertaintyMap predictive_entropy(const MeanProbability& mean);

/// U_c for every class: uncertainty values at pixels labelled c, row-major.
/// Entry 0 collects background pixels.
std::vector<std::vector<double>> part_uncertainty(const UncertaintyMap& unc, const SegmentationMap& seg,
                                                  int classes);

/// Max-shifted softmax. Empty input gives empty output.
std::vector<double> uncertainty_weights(std::span<const double> part_uncertainty);

}  // namespace fus
