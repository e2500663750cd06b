#include <cmath>

#include "fus/kernels.hpp"
#include "fus/metrics.hpp"

namespace fus::metrics {

std::optional<double> mean_nn_distance(std::span<const Vec3> from, std::span<const Vec3> to) {
  if (from.empty() || to.empty()) return std::nullopt;
  const auto d = simd::nearest_distances(from, to);
  double sum = 0.0;
  for (double x : d) sum += x;
  return sum / static_cast<double>(d.size());
}

std::optional<double> chamfer(std::span<const Vec3> sampled, std::span<const Vec3> reference) {
  const auto forward = mean_nn_distance(sampled, reference);
  const auto backward = mean_nn_distance(reference, sampled);
  if (!forward || !backward) return std::nullopt;
  return *forward + *backward;
}

std::optional<double> coverage(std::span<const Vec3> sampled, std::span<const Vec3> reference, double radius) {
  if (!(radius > 0.0)) throw InputError("coverage radius must be positive");
  if (reference.empty()) return std::nullopt;
  if (sampled.empty()) return 0.0;
  const auto d2 = simd::nearest_sq_distances(simd::PointsSoA(reference), simd::PointsSoA(sampled));
  const double r2 = radius * radius;
  std::size_t covered = 0;
  for (double x : d2) covered += x <= r2 ? 1 : 0;
  return static_cast<double>(covered) / static_cast<double>(reference.size());
}

std::vector<std::optional<double>> contamination(const SampledFrame& frame, const SegmentationMap& ground_truth) {
  std::vector<std::optional<double>> out(frame.parts.size());
  for (std::size_t c = 1; c < frame.parts.size(); ++c) {
    std::size_t counted = 0, wrong = 0;
    for (std::int32_t px : frame.parts[c].pixel) {
      if (px < 0) continue;
      if (static_cast<std::size_t>(px) >= ground_truth.values.size())
        throw InputError("sampled pixel index outside the ground-truth mask");
      ++counted;
      wrong += ground_truth.values[static_cast<std::size_t>(px)] != c ? 1 : 0;
    }
    if (counted > 0) out[c] = static_cast<double>(wrong) / static_cast<double>(counted);
  }
  return out;
}

std::optional<double> pair_consistency(std::span<const Vec3> previous, std::span<const Vec3> current,
                                       const Rigid& previous_pose, const Rigid& current_pose) {
  const Rigid step = current_pose * previous_pose.inverse();
  std::vector<Vec3> moved;
  moved.reserve(previous.size());
  for (const Vec3& p : previous) moved.push_back(step * p);
  return mean_nn_distance(moved, current);
}

ConsistencyResult temporal_consistency(std::span<const SampledFrame> frames,
                                       std::span<const std::vector<Rigid>> transforms, int classes) {
  if (frames.size() < 2) throw InputError("temporal consistency needs at least two frames");
  if (transforms.size() != frames.size()) throw InputError("one set of part transforms per frame is required");
  ConsistencyResult out;
  out.per_part.resize(static_cast<std::size_t>(classes));
  out.pairs_used.assign(static_cast<std::size_t>(classes), 0);
  out.pairs_skipped.assign(static_cast<std::size_t>(classes), 0);
  std::vector<double> sum(static_cast<std::size_t>(classes), 0.0);
  auto points_of = [](const SampledFrame& f, std::size_t c) -> std::span<const Vec3> {
    if (c >= f.parts.size()) return {};
    return f.parts[c].points;
  };
  for (std::size_t t = 0; t + 1 < frames.size(); ++t) {
    for (std::size_t c = 1; c < static_cast<std::size_t>(classes); ++c) {
      const auto prev = points_of(frames[t], c);
      const auto cur = points_of(frames[t + 1], c);
      const auto d = pair_consistency(prev, cur, transforms[t].at(c), transforms[t + 1].at(c));
      if (!d) {
        ++out.pairs_skipped[c];
        continue;
      }
      sum[c] += *d;
      ++out.pairs_used[c];
    }
  }
  for (std::size_t c = 1; c < static_cast<std::size_t>(classes); ++c)
    if (out.pairs_used[c] > 0) out.per_part[c] = sum[c] / out.pairs_used[c];
  return out;
}

}  // namespace fus::metrics
