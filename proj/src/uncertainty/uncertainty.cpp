#include <algorithm>
#include <cmath>
#include <string>

#include "fus/uncertainty.hpp"

namespace fus {

UncertaintyMap predictive_entropy(const MeanProbability& mean) {
  if (mean.classes < 2) throw InputError("entropy needs at least 2 classes, got " + std::to_string(mean.classes));
  UncertaintyMap out(mean.width, mean.height);
  const std::size_t n = mean.pixels();
  const double norm = std::log(static_cast<double>(mean.classes));
  for (int c = 0; c < mean.classes; ++c) {
    const double* p = mean.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = p[i];
      if (v > 0.0) out.values[i] -= v * std::log(v);
    }
  }
  for (double& u : out.values) u = std::clamp(u / norm, 0.0, 1.0);
  return out;
}

UncertaintyMap predictive_entropy(const ProbabilityStack& stack) {
  if (stack.classes < 2) throw InputError("entropy needs at least 2 classes, got " + std::to_string(stack.classes));
  return predictive_entropy(mean_probability(stack));
}

std::vector<std::vector<double>> part_uncertainty(const UncertaintyMap& unc, const SegmentationMap& seg,
                                                  int classes) {
  if (!unc.same_shape(seg.width, seg.height)) throw InputError("uncertainty and segmentation sizes differ");
  std::vector<std::vector<double>> out(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < seg.values.size(); ++i) {
    const int c = seg.values[i];
    if (c >= classes) throw InputError("label " + std::to_string(c) + " exceeds class count");
    out[static_cast<std::size_t>(c)].push_back(unc.values[i]);
  }
  return out;
}

std::vector<double> uncertainty_weights(std::span<const double> part_uncertainty) {
  std::vector<double> w(part_uncertainty.size());
  if (w.empty()) return w;
  double hi = part_uncertainty[0];
  for (double u : part_uncertainty) {
    if (!std::isfinite(u)) throw InputError("uncertainty vector contains a non-finite value");
    hi = std::max(hi, u);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(part_uncertainty[i] - hi);
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace fus
