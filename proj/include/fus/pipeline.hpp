// Per-frame perception loop: segmentation, lift, uncertainty, sampling.
#pragma once

#include "fus/consistency.hpp"
#include "fus/core.hpp"
#include "fus/sampler.hpp"
#include "fus/uncertainty.hpp"

namespace fus {

struct Perception {
  MeanProbability mean;
  SegmentationMap segmentation;
  UncertaintyMap uncertainty;
  PartPointCloud cloud;
  SceneCloud scene;  // filled only when requested
};

/// Mean map, argmax labels, entropy and lifted candidates for one frame.
/// A non-null `labels` replaces the argmax segmentation (oracle masks).
Perception perceive(const DepthMap& depth, const ProbabilityStack& stack, const CameraModel& camera,
                    bool with_scene, const SegmentationMap* labels = nullptr);

/// One trajectory's sampler state. Frames must be fed in order.
class SamplingSession {
 public:
  explicit SamplingSession(SamplerConfig cfg);

  SampledFrame step(long frame, const DepthMap& depth, const ProbabilityStack& stack, const CameraModel& camera,
                    double table_z, const SegmentationMap* labels = nullptr);

  const SampleQueue& queue() const { return queue_; }
  const SamplerConfig& config() const { return cfg_; }

 private:
  SamplerConfig cfg_;
  SampleQueue queue_;
};

}  // namespace fus
