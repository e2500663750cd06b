// Sampler quality metrics. All nearest-neighbour searches are exact.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fus/core.hpp"
#include "fus/sampler.hpp"

namespace fus::metrics {

/// Mean over `from` of the distance to the nearest point of `to`.
/// Empty `from` or `to` gives nullopt.
std::optional<double> mean_nn_distance(std::span<const Vec3> from, std::span<const Vec3> to);

/// Symmetric Chamfer distance (sum of both one-sided means), meters.
std::optional<double> chamfer(std::span<const Vec3> sampled, std::span<const Vec3> reference);

/// Fraction of reference points within `radius` of some sampled point.
/// Requires radius > 0; an empty reference gives nullopt.
std::optional<double> coverage(std::span<const Vec3> sampled, std::span<const Vec3> reference, double radius);

/// Per part: fraction of samples whose source pixel has a different
/// ground-truth label. Queue-reused points (pixel < 0) are not counted;
/// parts without counted samples give nullopt. Index = part id.
std::vector<std::optional<double>> contamination(const SampledFrame& frame, const SegmentationMap& ground_truth);

struct ConsistencyResult {
  std::vector<std::optional<double>> per_part;  // mean over usable frame pairs
  std::vector<int> pairs_used;
  std::vector<int> pairs_skipped;  // part missing in one frame of the pair
};

/// Motion-compensates frame t's part samples by the ground-truth motion
/// t -> t+1 and averages the mean NN distance to frame t+1's samples.
/// `transforms[t][c]` maps the part's rest pose to its pose at frame t.
ConsistencyResult temporal_consistency(std::span<const SampledFrame> frames,
                                       std::span<const std::vector<Rigid>> transforms, int classes);

/// Consistency term for one pair only.
std::optional<double> pair_consistency(std::span<const Vec3> previous, std::span<const Vec3> current,
                                       const Rigid& previous_pose, const Rigid& current_pose);

}  // namespace fus::metrics
