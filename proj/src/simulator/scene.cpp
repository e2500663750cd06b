#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fus/simulator.hpp"

namespace fus::sim {

namespace {

constexpr double kPi = std::numbers::pi;

// Per-seed stream tags.
constexpr std::uint64_t kDimsStream = 0x5CE4E;
constexpr std::uint64_t kTrajectoryStream = 0x7A7EC;

Rigid translation(const Vec3& t) {
  Rigid r = Rigid::Identity();
  r.translation() = t;
  return r;
}

Rigid rotation_about_z(const Vec3& pivot, double angle) {
  Rigid r = Rigid::Identity();
  r.linear() = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
  r.translation() = pivot - r.linear() * pivot;
  return r;
}

Primitive box(const Vec3& center, const Vec3& half, int part) {
  Primitive p;
  p.shape = Primitive::Shape::kBox;
  p.pose = translation(center);
  p.half_extents = half;
  p.part = PartId{part};
  return p;
}

double drawer_center_z(const SceneSpec& s) { return s.table_z + s.body_height - s.border - s.facade_height / 2; }

/// Handle bar center at rest.
Vec3 handle_rest_center(const SceneSpec& s) {
  const double y = -s.facade_thickness - s.handle_standoff - s.handle_thickness / 2;
  switch (s.kind) {
    case ObjectKind::kDoor:
      return {s.facade_width / 2 - s.handle_inset, y, s.table_z + s.border + s.facade_height / 2};
    case ObjectKind::kDrawer:
      return {0.0, y, drawer_center_z(s)};
    case ObjectKind::kFaucet:
      return {s.handle_length / 2, 0.0, s.table_z + s.base_height + s.handle_thickness / 2};
  }
  return Vec3::Zero();
}

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

void add_box_surface(const Primitive& p, double spacing, std::vector<Vec3>& out) {
  const Vec3& h = p.half_extents;
  for (int axis = 0; axis < 3; ++axis) {
    const int a = (axis + 1) % 3;
    const int b = (axis + 2) % 3;
    const int na = std::max(2, static_cast<int>(std::ceil(2 * h[a] / spacing)) + 1);
    const int nb = std::max(2, static_cast<int>(std::ceil(2 * h[b] / spacing)) + 1);
    for (int side = -1; side <= 1; side += 2) {
      for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
          Vec3 local;
          local[axis] = side * h[axis];
          local[a] = -h[a] + 2 * h[a] * i / (na - 1);
          local[b] = -h[b] + 2 * h[b] * j / (nb - 1);
          out.push_back(p.pose * local);
        }
      }
    }
  }
}

void add_cylinder_surface(const Primitive& p, double spacing, std::vector<Vec3>& out) {
  const int around = std::max(8, static_cast<int>(std::ceil(2 * kPi * p.radius / spacing)));
  const int up = std::max(2, static_cast<int>(std::ceil(2 * p.half_height / spacing)) + 1);
  for (int i = 0; i < around; ++i) {
    const double a = 2 * kPi * i / around;
    for (int j = 0; j < up; ++j) {
      const double z = -p.half_height + 2 * p.half_height * j / (up - 1);
      out.push_back(p.pose * Vec3(p.radius * std::cos(a), p.radius * std::sin(a), z));
    }
  }
  const int rings = std::max(1, static_cast<int>(std::ceil(p.radius / spacing)));
  for (int cap = -1; cap <= 1; cap += 2) {
    out.push_back(p.pose * Vec3(0, 0, cap * p.half_height));
    for (int r = 1; r <= rings; ++r) {
      const double rad = p.radius * r / rings;
      const int n = std::max(6, static_cast<int>(std::ceil(2 * kPi * rad / spacing)));
      for (int i = 0; i < n; ++i) {
        const double a = 2 * kPi * i / n;
        out.push_back(p.pose * Vec3(rad * std::cos(a), rad * std::sin(a), cap * p.half_height));
      }
    }
  }
}

double surface_area(const Primitive& p) {
  if (p.shape == Primitive::Shape::kBox) {
    const Vec3 e = 2 * p.half_extents;
    return 2 * (e.x() * e.y() + e.y() * e.z() + e.z() * e.x());
  }
  return 2 * kPi * p.radius * 2 * p.half_height + 2 * kPi * p.radius * p.radius;
}

}  // namespace

std::string_view kind_name(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::kDoor:
      return "door";
    case ObjectKind::kDrawer:
      return "drawer";
    case ObjectKind::kFaucet:
      return "faucet";
  }
  return "unknown";
}

ObjectKind parse_kind(std::string_view name) {
  if (name == "door") return ObjectKind::kDoor;
  if (name == "drawer") return ObjectKind::kDrawer;
  if (name == "faucet") return ObjectKind::kFaucet;
  throw InputError("unknown object kind '" + std::string(name) + "' (expected door, drawer or faucet)");
}

std::vector<std::string> SceneSpec::part_names() const {
  if (kind == ObjectKind::kFaucet) return {"background", "base", "handle"};
  return {"background", "base", "facade", "handle"};
}

PartId SceneSpec::handle_part() const { return PartId{kind == ObjectKind::kFaucet ? 2 : 3}; }

void SceneSpec::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string("scene ") + what + " must be positive");
  };
  if (kind == ObjectKind::kFaucet) {
    positive(base_radius, "base_radius");
    positive(base_height, "base_height");
  } else {
    positive(body_width, "body_width");
    positive(body_height, "body_height");
    positive(body_depth, "body_depth");
    positive(facade_width, "facade_width");
    positive(facade_height, "facade_height");
    positive(facade_thickness, "facade_thickness");
  }
  positive(handle_length, "handle_length");
  positive(handle_thickness, "handle_thickness");
  positive(joint_limit, "joint_limit");
  if (joint_values.empty()) throw InputError("scene trajectory is empty");
  if (joint_values.size() != camera_poses.size())
    throw InputError("joint and camera trajectories differ in length");
  for (double q : joint_values)
    if (!(q >= 0.0) || q > joint_limit) throw InputError("joint value outside [0, joint_limit]");
  if (!(intrinsics.fx > 0) || !(intrinsics.fy > 0) || intrinsics.width < 1 || intrinsics.height < 1)
    throw InputError("invalid intrinsics");
}

SceneSpec build_scene(ObjectKind kind, std::uint64_t seed, int frames) {
  if (frames < 1) throw InputError("a scene needs at least one frame");
  Rng rng = Rng::stream(seed, kDimsStream);
  SceneSpec s;
  s.kind = kind;
  s.seed = seed;
  s.table_z = 0.0;
  s.handle_standoff = rng.uniform(0.025, 0.04);
  switch (kind) {
    case ObjectKind::kDoor:
      s.facade_width = rng.uniform(0.3, 0.8);
      s.facade_height = rng.uniform(0.3, 0.8);
      s.body_width = s.facade_width + 2 * s.border;
      s.body_height = s.facade_height + 2 * s.border;
      s.body_depth = rng.uniform(0.3, 0.5);
      s.handle_length = rng.uniform(0.02, 0.10);
      s.handle_inset = rng.uniform(0.04, 0.07);
      s.joint_limit = kPi / 2;
      break;
    case ObjectKind::kDrawer:
      s.body_width = rng.uniform(0.4, 0.8);
      s.body_height = rng.uniform(0.3, 0.6);
      s.body_depth = rng.uniform(0.35, 0.5);
      s.facade_width = s.body_width - 2 * s.border;
      s.facade_height = rng.uniform(0.12, 0.25);
      s.handle_length = rng.uniform(0.02, 0.10);
      s.joint_limit = 0.3;
      break;
    case ObjectKind::kFaucet:
      s.base_radius = rng.uniform(0.025, 0.04);
      s.base_height = rng.uniform(0.15, 0.3);
      s.handle_length = rng.uniform(0.05, 0.15);
      s.handle_standoff = 0.0;
      s.joint_limit = kPi / 2;
      break;
  }
  plan_trajectories(s, frames);
  return s;
}

void plan_trajectories(SceneSpec& s, int frames) {
  if (frames < 1) throw InputError("a scene needs at least one frame");
  Rng rng = Rng::stream(s.seed, kTrajectoryStream);
  double final_joint = 0.0;
  switch (s.kind) {
    case ObjectKind::kDoor:
      final_joint = rng.uniform(0.25, 0.45);
      break;
    case ObjectKind::kDrawer:
      final_joint = rng.uniform(0.10, 0.20);
      break;
    case ObjectKind::kFaucet:
      final_joint = rng.uniform(0.4, 0.8);
      break;
  }
  final_joint = std::min(final_joint, s.joint_limit);
  const double start_dist = rng.uniform(0.7, 0.9);
  const double end_dist = s.kind == ObjectKind::kFaucet ? rng.uniform(0.25, 0.32) : rng.uniform(0.30, 0.40);
  const double azimuth = rng.uniform(-0.35, 0.35);
  const double elevation = rng.uniform(0.15, 0.45);
  const double sway_phase = rng.uniform(0.0, 2 * kPi);

  s.joint_values.assign(static_cast<std::size_t>(frames), 0.0);
  s.camera_poses.assign(static_cast<std::size_t>(frames), Rigid::Identity());
  const double half = std::max(1.0, frames / 2.0);
  for (int t = 0; t < frames; ++t) {
    // Approach during the first half, then articulate while following the handle.
    const double approach = std::min(1.0, t / half);
    const double articulate = smoothstep((t - half) / std::max(1.0, frames - 1 - half));
    s.joint_values[static_cast<std::size_t>(t)] = final_joint * articulate;

    const auto motion = part_transforms(s, s.joint_values[static_cast<std::size_t>(t)]);
    const Vec3 target = motion[static_cast<std::size_t>(s.handle_part().value)] * handle_rest_center(s);
    const double dist = start_dist + (end_dist - start_dist) * approach;
    const double az = azimuth + 0.03 * std::sin(0.7 * t + sway_phase);
    const Vec3 view(std::sin(az) * std::cos(elevation), -std::cos(az) * std::cos(elevation), std::sin(elevation));
    const Vec3 eye = target + dist * view;

    const Vec3 z_cam = (target - eye).normalized();
    const Vec3 x_cam = z_cam.cross(Vec3::UnitZ()).normalized();
    const Vec3 y_cam = z_cam.cross(x_cam);
    Rigid pose = Rigid::Identity();
    pose.linear().col(0) = x_cam;
    pose.linear().col(1) = y_cam;
    pose.linear().col(2) = z_cam;
    pose.translation() = eye;
    s.camera_poses[static_cast<std::size_t>(t)] = pose;
  }
}

std::vector<Primitive> scene_primitives(const SceneSpec& s) {
  std::vector<Primitive> prims;
  const double z0 = s.table_z;
  const double t = s.facade_thickness;
  const double ht = s.handle_thickness / 2;
  const Vec3 hc = handle_rest_center(s);
  switch (s.kind) {
    case ObjectKind::kDoor:
      prims.push_back(box({0, s.body_depth / 2, z0 + s.body_height / 2},
                          {s.body_width / 2, s.body_depth / 2, s.body_height / 2}, 1));
      prims.push_back(box({0, -t / 2, z0 + s.border + s.facade_height / 2},
                          {s.facade_width / 2, t / 2, s.facade_height / 2}, 2));
      prims.push_back(box(hc, {ht, ht, s.handle_length / 2}, 3));
      break;
    case ObjectKind::kDrawer: {
      const double zc = drawer_center_z(s);
      const double inner = s.body_depth - 0.03;
      prims.push_back(box({0, s.body_depth / 2, z0 + s.body_height / 2},
                          {s.body_width / 2, s.body_depth / 2, s.body_height / 2}, 1));
      prims.push_back(box({0, -t / 2, zc}, {s.facade_width / 2, t / 2, s.facade_height / 2}, 2));
      prims.push_back(box({0, inner / 2, zc}, {s.facade_width / 2 - 0.01, inner / 2, s.facade_height / 2 - 0.01}, 2));
      prims.push_back(box(hc, {s.handle_length / 2, ht, ht}, 3));
      break;
    }
    case ObjectKind::kFaucet: {
      Primitive base;
      base.shape = Primitive::Shape::kCylinder;
      base.pose = translation({0, 0, z0 + s.base_height / 2});
      base.radius = s.base_radius;
      base.half_height = s.base_height / 2;
      base.part = PartId{1};
      prims.push_back(base);
      prims.push_back(box(hc, {s.handle_length / 2, ht, ht}, 2));
      break;
    }
  }
  return prims;
}

std::vector<Rigid> part_transforms(const SceneSpec& s, double q) {
  std::vector<Rigid> out(static_cast<std::size_t>(s.classes()), Rigid::Identity());
  switch (s.kind) {
    case ObjectKind::kDoor: {
      const Rigid hinge = rotation_about_z({-s.facade_width / 2, 0.0, 0.0}, -q);
      out[2] = hinge;
      out[3] = hinge;
      break;
    }
    case ObjectKind::kDrawer: {
      const Rigid slide = translation({0.0, -q, 0.0});
      out[2] = slide;
      out[3] = slide;
      break;
    }
    case ObjectKind::kFaucet:
      out[2] = rotation_about_z(Vec3::Zero(), -q);
      break;
  }
  return out;
}

std::vector<std::vector<Vec3>> reference_clouds(const SceneSpec& spec) {
  const auto prims = scene_primitives(spec);
  std::vector<std::vector<Vec3>> out(static_cast<std::size_t>(spec.classes()));
  std::vector<double> area(out.size(), 0.0);
  for (const auto& p : prims) area[static_cast<std::size_t>(p.part.value)] += surface_area(p);
  for (const auto& p : prims) {
    const double spacing = std::max(0.002, std::sqrt(area[static_cast<std::size_t>(p.part.value)] / 40000.0));
    auto& dst = out[static_cast<std::size_t>(p.part.value)];
    if (p.shape == Primitive::Shape::kBox)
      add_box_surface(p, spacing, dst);
    else
      add_cylinder_surface(p, spacing, dst);
  }
  return out;
}

}  // namespace fus::sim
