// Deterministic synthetic articulated scenes: analytic primitives,
// ray-cast depth, ground-truth masks and noisy probability stacks.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fus/core.hpp"
#include "fus/rng.hpp"

namespace fus::sim {

enum class ObjectKind { kDoor, kDrawer, kFaucet };

std::string_view kind_name(ObjectKind kind);
ObjectKind parse_kind(std::string_view name);

inline constexpr int kImageWidth = 256;
inline constexpr int kImageHeight = 144;

struct Intrinsics {
  double fx = 200.0;
  double fy = 200.0;
  double cx = 127.5;
  double cy = 71.5;
  int width = kImageWidth;
  int height = kImageHeight;
};

/// Scene parameters; geometry and trajectories derive from these.
/// Lengths in meters, angles in radians.
struct SceneSpec {
  ObjectKind kind = ObjectKind::kDoor;
  std::uint64_t seed = 0;
  double table_z = 0.0;

  // Door: cabinet body behind a hinged facade. Drawer: cabinet body with a
  // sliding drawer (front + box). Faucet: cylindrical base, lever handle.
  double body_width = 0.0;
  double body_height = 0.0;
  double body_depth = 0.0;
  double facade_width = 0.0;
  double facade_height = 0.0;
  double facade_thickness = 0.02;
  double border = 0.03;
  double base_radius = 0.0;  // faucet only
  double base_height = 0.0;  // faucet only

  double handle_length = 0.0;
  double handle_thickness = 0.015;
  double handle_standoff = 0.0;  // gap between facade front and handle bar
  double handle_inset = 0.0;     // door: distance from the free edge

  double joint_limit = 0.0;  // rad for door/faucet, m for drawer

  Intrinsics intrinsics;
  std::vector<double> joint_values;  // per frame
  std::vector<Rigid> camera_poses;   // camera-to-world per frame

  int frames() const { return static_cast<int>(joint_values.size()); }
  /// Part names indexed by id; entry 0 is "background".
  std::vector<std::string> part_names() const;
  int classes() const { return static_cast<int>(part_names().size()); }
  PartId handle_part() const;
  PartId base_part() const { return PartId{1}; }
  void validate() const;
};

/// Randomized dimensions (artifact ranges) plus planned trajectories.
SceneSpec build_scene(ObjectKind kind, std::uint64_t seed, int frames = 20);

/// Recomputes joint and camera trajectories from the current dimensions.
void plan_trajectories(SceneSpec& spec, int frames);

/// Scene primitive at the spec's rest configuration.
struct Primitive {
  enum class Shape { kBox, kCylinder } shape = Shape::kBox;
  Rigid pose = Rigid::Identity();  // local-to-world at rest
  Vec3 half_extents = Vec3::Zero();  // box
  double radius = 0.0;               // cylinder, axis = local z
  double half_height = 0.0;
  PartId part;
};

std::vector<Primitive> scene_primitives(const SceneSpec& spec);

/// Rest-to-current rigid motion of every part at a joint value; index = part id.
std::vector<Rigid> part_transforms(const SceneSpec& spec, double joint_value);

/// Ray parameter of the first hit with t > 0, if any. `dir` need not be unit.
std::optional<double> intersect(const Primitive& prim, const Rigid& motion, const Vec3& origin, const Vec3& dir);

struct RenderedFrame {
  DepthMap depth;             // exact double depths; 0 where no hit
  SegmentationMap labels;     // part id of the nearest hit, 0 for table or none
  CameraModel camera;
  std::vector<Rigid> part_transforms;
};

CameraModel frame_camera(const SceneSpec& spec, int frame);

/// Ray casts one frame against the posed primitives and the table.
RenderedFrame render_frame(const SceneSpec& spec, int frame);

enum class BlobTarget { kHandleAdjacent, kRandomPart };

std::string_view blob_target_name(BlobTarget t);
BlobTarget parse_blob_target(std::string_view name);

/// Sensor and segmentation noise. Rates in [0,1], sigmas >= 0.
struct NoiseSpec {
  double depth_sigma = 0.002;
  double salt_pepper_rate = 0.005;
  double max_range = 4.0;  // value written by "salt" pixels
  double logit_sigma = 0.5;
  double logit_margin = 1.5;
  double blob_rate = 0.1;  // chance of one misclassified blob per frame
  double blob_radius_min = 3.0;
  double blob_radius_max = 8.0;
  BlobTarget blob_target = BlobTarget::kHandleAdjacent;
  double blob_adjacency = 6.0;  // px; handle-adjacent centers lie this close to the handle
  int boundary_jitter = 1;      // px; per-inference label shift range

  static NoiseSpec zero();
  void validate() const;
};

struct NoisyFrame {
  DepthMap depth;
  ProbabilityStack stack;
  SegmentationMap blob_mask;  // 1 where the frame's blob was painted (inference-independent core)
};

/// Depth: Gaussian + salt-and-pepper, quantized to float32. Stack: per
/// inference a jittered copy of the ground truth (plus the frame's blob)
/// turned into soft probabilities with logit noise acting as temperature.
NoisyFrame corrupt(const RenderedFrame& clean, const NoiseSpec& noise, int inferences, int classes,
                   PartId handle, std::uint64_t seed, long frame);

struct SequenceFrame {
  DepthMap depth;        // noisy, float32-representable
  DepthMap clean_depth;  // float32-representable
  SegmentationMap ground_truth;
  ProbabilityStack stack;
  CameraModel camera;
  std::vector<Rigid> part_transforms;
};

struct SceneSequence {
  SceneSpec spec;
  NoiseSpec noise;
  std::uint64_t noise_seed = 0;
  int inferences = 4;
  std::vector<SequenceFrame> frames;
  std::vector<std::vector<Vec3>> reference;  // dense rest-pose surface per part id

  int classes() const { return spec.classes(); }
};

/// Dense rest-pose surface samples per part, spacing chosen per part.
std::vector<std::vector<Vec3>> reference_clouds(const SceneSpec& spec);

SceneSequence generate_sequence(const SceneSpec& spec, const NoiseSpec& noise, int inferences,
                                std::uint64_t noise_seed);

/// Ground-truth visible points of each part in one frame (clean depth + masks).
std::vector<std::vector<Vec3>> visible_reference(const SequenceFrame& frame, int classes);

}  // namespace fus::sim
