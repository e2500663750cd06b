#include "fus/simulator.hpp"

namespace fus::sim {

namespace {

DepthMap quantize(const DepthMap& d) {
  DepthMap out = d;
  for (double& v : out.values) v = static_cast<double>(static_cast<float>(v));
  return out;
}

}  // namespace

SceneSequence generate_sequence(const SceneSpec& spec, const NoiseSpec& noise, int inferences,
                                std::uint64_t noise_seed) {
  spec.validate();
  noise.validate();
  if (inferences < 1) throw InputError("need at least one inference");
  SceneSequence seq;
  seq.spec = spec;
  seq.noise = noise;
  seq.noise_seed = noise_seed;
  seq.inferences = inferences;
  seq.reference = reference_clouds(spec);
  seq.frames.reserve(static_cast<std::size_t>(spec.frames()));
  for (int t = 0; t < spec.frames(); ++t) {
    RenderedFrame clean = render_frame(spec, t);
    NoisyFrame noisy = corrupt(clean, noise, inferences, spec.classes(), spec.handle_part(), noise_seed, t);
    SequenceFrame f;
    f.depth = std::move(noisy.depth);
    f.clean_depth = quantize(clean.depth);
    f.ground_truth = std::move(clean.labels);
    f.stack = std::move(noisy.stack);
    f.camera = clean.camera;
    f.part_transforms = std::move(clean.part_transforms);
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

std::vector<std::vector<Vec3>> visible_reference(const SequenceFrame& frame, int classes) {
  PartPointCloud cloud = lift_to_world(frame.clean_depth, frame.ground_truth, frame.camera, classes);
  std::vector<std::vector<Vec3>> out(static_cast<std::size_t>(classes));
  for (int c = 1; c < classes; ++c) out[static_cast<std::size_t>(c)] = std::move(cloud.parts[static_cast<std::size_t>(c)].points);
  return out;
}

}  // namespace fus::sim
