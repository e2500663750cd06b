#include "fus/pipeline.hpp"

namespace fus {

Perception perceive(const DepthMap& depth, const ProbabilityStack& stack, const CameraModel& camera,
                    bool with_scene, const SegmentationMap* labels) {
  if (stack.width != depth.width || stack.height != depth.height)
    throw InputError("probability stack and depth map differ in size");
  Perception p;
  p.mean = mean_probability(stack);
  p.segmentation = labels ? *labels : argmax_segmentation(p.mean);
  p.uncertainty = predictive_entropy(p.mean);
  p.cloud = lift_to_world(depth, p.segmentation, camera, stack.classes, &p.uncertainty, &p.mean);
  if (with_scene) p.scene = lift_scene(depth, p.segmentation, camera);
  return p;
}

SamplingSession::SamplingSession(SamplerConfig cfg) : cfg_(cfg), queue_(cfg.queue_length) { cfg_.validate(); }

SampledFrame SamplingSession::step(long frame, const DepthMap& depth, const ProbabilityStack& stack,
                                   const CameraModel& camera, double table_z, const SegmentationMap* labels) {
  const bool need_scene = cfg_.strategy == Strategy::kUniformDownsample;
  const Perception p = perceive(depth, stack, camera, need_scene, labels);
  FrameInput in;
  in.frame = frame;
  in.cloud = &p.cloud;
  in.scene = need_scene ? &p.scene : nullptr;
  in.table_z = table_z;
  return sample_frame(in, queue_, cfg_);
}

}  // namespace fus
