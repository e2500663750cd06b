#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fus/consistency.hpp"
#include "fus/kernels.hpp"

namespace fus {

SampleQueue::SampleQueue(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw InputError("queue capacity must be at least 1");
}

void SampleQueue::push(PartId part, long frame, std::vector<Vec3> points) {
  if (part.value < 0) throw InputError("negative part id");
  if (static_cast<std::size_t>(part.value) >= per_part_.size()) per_part_.resize(static_cast<std::size_t>(part.value) + 1);
  auto& q = per_part_[static_cast<std::size_t>(part.value)];
  if (!q.empty() && frame <= q.back().frame)
    throw InputError("queue frames must increase: got " + std::to_string(frame) + " after " +
                     std::to_string(q.back().frame));
  q.push_back(QueueEntry{frame, std::move(points)});
  while (q.size() > static_cast<std::size_t>(capacity_)) q.pop_front();
}

const std::deque<QueueEntry>& SampleQueue::entries(PartId part) const {
  static const std::deque<QueueEntry> kEmpty;
  if (part.value < 0 || static_cast<std::size_t>(part.value) >= per_part_.size()) return kEmpty;
  return per_part_[static_cast<std::size_t>(part.value)];
}

bool SampleQueue::empty() const {
  for (const auto& q : per_part_)
    if (!q.empty()) return false;
  return true;
}

const QueueEntry* SampleQueue::latest(PartId part) const {
  const auto& q = entries(part);
  return q.empty() ? nullptr : &q.back();
}

std::vector<Vec3> SampleQueue::stored_points(PartId part) const {
  std::vector<Vec3> out;
  for (const auto& e : entries(part)) out.insert(out.end(), e.points.begin(), e.points.end());
  return out;
}

std::vector<double> distance_to_queue(std::span<const Vec3> candidates, const SampleQueue& queue, PartId part) {
  const auto stored = queue.stored_points(part);
  if (stored.empty()) return std::vector<double>(candidates.size(), 0.0);
  return simd::nearest_distances(candidates, stored);
}

std::vector<double> consistency_weights(std::span<const double> distances, double decay) {
  if (!(decay > 0.0) || !std::isfinite(decay)) throw InputError("decay coefficient must be positive");
  std::vector<double> w(distances.size());
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const double d = distances[i];
    if (!(d >= 0.0) || !std::isfinite(d))
      throw InputError("distance " + std::to_string(i) + " is negative or non-finite");
    // Stays strictly positive even for distances that would underflow.
    w[i] = std::max(std::exp2(-decay * d), std::numeric_limits<double>::denorm_min());
  }
  return w;
}

void push_samples(SampleQueue& queue, const PartSampleSets& sampled, long frame) {
  for (std::size_t c = 1; c < sampled.parts.size(); ++c)
    if (!sampled.parts[c].empty()) queue.push(PartId{static_cast<int>(c)}, frame, sampled.parts[c]);
}

}  // namespace fus
