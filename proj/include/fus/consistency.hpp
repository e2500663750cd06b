// Bounded history of sampled part points and frame-consistency weights.
#pragma once

#include <deque>
#include <span>
#include <vector>

#include "fus/core.hpp"

namespace fus {

/// Sampled points of one part at one frame.
struct QueueEntry {
  long frame = 0;
  std::vector<Vec3> points;
};

/// Per-part FIFO of the last `capacity` sampled sets (T_fc). Single writer.
class SampleQueue {
 public:
  explicit SampleQueue(int capacity = 3);

  int capacity() const { return capacity_; }

  /// Appends `points` for `part` at `frame`; evicts the oldest entry past
  /// capacity. Frames must be pushed in increasing order per part.
  void push(PartId part, long frame, std::vector<Vec3> points);

  const std::deque<QueueEntry>& entries(PartId part) const;
  bool empty(PartId part) const { return entries(part).empty(); }
  /// True when no part has any entry.
  bool empty() const;

  /// Most recent entry for the part, or nullptr.
  const QueueEntry* latest(PartId part) const;

  /// Union of every stored point for the part, oldest entry first.
  std::vector<Vec3> stored_points(PartId part) const;

  /// Highest part id with storage.
  int parts() const { return static_cast<int>(per_part_.size()); }

 private:
  int capacity_;
  std::vector<std::deque<QueueEntry>> per_part_;
};

/// Per-part sampled sets handed to push_samples; index = part id.
struct PartSampleSets {
  std::vector<std::vector<Vec3>> parts;
};

/// Distance from each candidate to the nearest point stored for `part`,
/// across every queued entry. All zeros when the part's queue is empty.
std::vector<double> distance_to_queue(std::span<const Vec3> candidates, const SampleQueue& queue, PartId part);

/// w_i = 2^(-decay * d_i). Throws InputError on negative or non-finite
/// distances or non-positive decay.
std::vector<double> consistency_weights(std::span<const double> distances, double decay);

/// Pushes each non-empty per-part set at `frame`.
void push_samples(SampleQueue& queue, const PartSampleSets& sampled, long frame);

}  // namespace fus
