#include <algorithm>
#include <cmath>
#include <limits>

#include "fus/simulator.hpp"

namespace fus::sim {

namespace {

constexpr double kTableHalfSize = 1.0;  // table is a 2 m x 2 m square around the origin

std::optional<double> intersect_box(const Vec3& half, const Vec3& o, const Vec3& d) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < -half[a] || o[a] > half[a]) return std::nullopt;
      continue;
    }
    double t0 = (-half[a] - o[a]) / d[a];
    double t1 = (half[a] - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_near > 0.0) return t_near;
  if (t_far > 0.0) return t_far;
  return std::nullopt;
}

std::optional<double> intersect_cylinder(double radius, double half_height, const Vec3& o, const Vec3& d) {
  double best = std::numeric_limits<double>::infinity();
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 0.0) {
    const double b = 2 * (o.x() * d.x() + o.y() * d.y());
    const double c = o.x() * o.x() + o.y() * o.y() - radius * radius;
    const double disc = b * b - 4 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
        if (t <= 0.0) continue;
        const double z = o.z() + t * d.z();
        if (std::abs(z) <= half_height) best = std::min(best, t);
      }
    }
  }
  if (d.z() != 0.0) {
    for (double cap : {-half_height, half_height}) {
      const double t = (cap - o.z()) / d.z();
      if (t <= 0.0) continue;
      const double x = o.x() + t * d.x();
      const double y = o.y() + t * d.y();
      if (x * x + y * y <= radius * radius) best = std::min(best, t);
    }
  }
  if (std::isfinite(best)) return best;
  return std::nullopt;
}

}  // namespace

std::optional<double> intersect(const Primitive& prim, const Rigid& motion, const Vec3& origin, const Vec3& dir) {
  const Rigid to_local = (motion * prim.pose).inverse();
  const Vec3 o = to_local * origin;
  const Vec3 d = to_local.linear() * dir;
  if (prim.shape == Primitive::Shape::kBox) return intersect_box(prim.half_extents, o, d);
  return intersect_cylinder(prim.radius, prim.half_height, o, d);
}

CameraModel frame_camera(const SceneSpec& spec, int frame) {
  if (frame < 0 || frame >= spec.frames()) throw InputError("frame index out of range");
  CameraModel cam;
  cam.fx = spec.intrinsics.fx;
  cam.fy = spec.intrinsics.fy;
  cam.cx = spec.intrinsics.cx;
  cam.cy = spec.intrinsics.cy;
  cam.camera_to_world = spec.camera_poses[static_cast<std::size_t>(frame)];
  return cam;
}

RenderedFrame render_frame(const SceneSpec& spec, int frame) {
  RenderedFrame out;
  out.camera = frame_camera(spec, frame);
  out.part_transforms = part_transforms(spec, spec.joint_values[static_cast<std::size_t>(frame)]);
  const int w = spec.intrinsics.width;
  const int h = spec.intrinsics.height;
  out.depth = DepthMap(w, h, 0.0);
  out.labels = SegmentationMap(w, h, 0);

  const auto prims = scene_primitives(spec);
  // Pre-compose world-to-local once per primitive.
  std::vector<Rigid> to_local;
  to_local.reserve(prims.size());
  for (const auto& p : prims)
    to_local.push_back((out.part_transforms[static_cast<std::size_t>(p.part.value)] * p.pose).inverse());

  const Mat3 r = out.camera.camera_to_world.linear();
  const Vec3 eye = out.camera.camera_to_world.translation();
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      // Camera-frame direction with unit z, so the ray parameter is the depth.
      const Vec3 dir = r * Vec3((u - out.camera.cx) / out.camera.fx, (v - out.camera.cy) / out.camera.fy, 1.0);
      double best = std::numeric_limits<double>::infinity();
      int label = -1;
      for (std::size_t i = 0; i < prims.size(); ++i) {
        const Vec3 o = to_local[i] * eye;
        const Vec3 d = to_local[i].linear() * dir;
        const auto hit = prims[i].shape == Primitive::Shape::kBox
                             ? intersect_box(prims[i].half_extents, o, d)
                             : intersect_cylinder(prims[i].radius, prims[i].half_height, o, d);
        if (hit && *hit < best) {
          best = *hit;
          label = prims[i].part.value;
        }
      }
      if (dir.z() < 0.0) {
        const double t = (spec.table_z - eye.z()) / dir.z();
        const Vec3 p = eye + t * dir;
        if (t > 0.0 && t < best && std::abs(p.x()) <= kTableHalfSize && std::abs(p.y()) <= kTableHalfSize) {
          best = t;
          label = 0;
        }
      }
      if (label < 0) continue;
      out.depth.at(u, v) = best;
      out.labels.at(u, v) = static_cast<std::uint8_t>(label);
    }
  }
  return out;
}

}  // namespace fus::sim
