#include <cmath>
#include <string>

#include "fus/core.hpp"
#include "fus/kernels.hpp"

namespace fus {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InputError("camera focal lengths must be positive");
  const Mat3 r = camera_to_world.linear();
  if (!r.allFinite() || !camera_to_world.translation().allFinite())
    throw InputError("camera extrinsic is not finite");
  if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw InputError("camera rotation is not orthonormal");
  if (std::abs(r.determinant() - 1.0) > 1e-9) throw InputError("camera rotation determinant is not +1");
}

void ProbabilityStack::validate() const {
  if (inferences < 1) throw InputError("probability stack needs at least one inference");
  if (classes < 1) throw InputError("probability stack needs at least one class");
  if (width <= 0 || height <= 0) throw InputError("probability stack has empty raster");
  if (data.size() != static_cast<std::size_t>(inferences) * classes * pixels())
    throw InputError("probability stack storage does not match K*C*H*W");
  const std::size_t n = pixels();
  std::vector<double> sum(n);
  for (int k = 0; k < inferences; ++k) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (int c = 0; c < classes; ++c) {
      const float* p = plane(k, c);
      for (std::size_t i = 0; i < n; ++i) {
        const float v = p[i];
        if (!(v >= 0.0f) || !std::isfinite(v))
          throw InputError("negative or non-finite probability at inference " + std::to_string(k) + ", class " +
                           std::to_string(c) + ", pixel " + std::to_string(i));
        sum[i] += v;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (sum[i] == 0.0)
        throw InputError("all-zero probability vector at inference " + std::to_string(k) + ", pixel " +
                         std::to_string(i));
      if (std::abs(sum[i] - 1.0) > 1e-6)
        throw InputError("probabilities do not sum to 1 at inference " + std::to_string(k) + ", pixel " +
                         std::to_string(i));
    }
  }
}

void PartPoints::reserve(std::size_t n) {
  points.reserve(n);
  uncertainty.reserve(n);
  score.reserve(n);
  pixel.reserve(n);
}

void PartPoints::push(const Vec3& p, double unc, double sc, std::int32_t px) {
  points.push_back(p);
  uncertainty.push_back(unc);
  score.push_back(sc);
  pixel.push_back(px);
}

std::size_t PartPointCloud::total_points() const {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.size();
  return n;
}

Vec3 backproject(const CameraModel& cam, double u, double v, double depth) {
  return {(u - cam.cx) * depth / cam.fx, (v - cam.cy) * depth / cam.fy, depth};
}

Vec3 project(const CameraModel& cam, const Vec3& world) {
  const Vec3 c = cam.camera_to_world.inverse() * world;
  return {cam.fx * c.x() / c.z() + cam.cx, cam.fy * c.y() / c.z() + cam.cy, c.z()};
}

namespace {

void check_shapes(const DepthMap& depth, const SegmentationMap& seg) {
  if (depth.width != seg.width || depth.height != seg.height)
    throw InputError("depth map is " + std::to_string(depth.width) + "x" + std::to_string(depth.height) +
                     " but segmentation map is " + std::to_string(seg.width) + "x" + std::to_string(seg.height));
  if (depth.values.size() != depth.size() || seg.values.size() != static_cast<std::size_t>(seg.width) * seg.height)
    throw InputError("raster storage does not match its dimensions");
}

}  // namespace

PartPointCloud lift_to_world(const DepthMap& depth, const SegmentationMap& seg, const CameraModel& cam,
                             int classes) {
  return lift_to_world(depth, seg, cam, classes, nullptr, nullptr);
}

PartPointCloud lift_to_world(const DepthMap& depth, const SegmentationMap& seg, const CameraModel& cam,
                             int classes, const Raster<double>* uncertainty, const MeanProbability* mean) {
  check_shapes(depth, seg);
  cam.validate();
  if (classes < 1) throw InputError("class count must be positive");
  if (uncertainty && !uncertainty->same_shape(depth.width, depth.height))
    throw InputError("uncertainty map does not match depth dimensions");
  if (mean && (mean->width != depth.width || mean->height != depth.height || mean->classes != classes))
    throw InputError("mean probability map does not match depth dimensions or class count");

  PartPointCloud cloud;
  cloud.parts.resize(static_cast<std::size_t>(classes));
  const Mat3 r = cam.camera_to_world.linear();
  const Vec3 t = cam.camera_to_world.translation();
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const std::size_t px = static_cast<std::size_t>(v) * depth.width + u;
      const PartId label = seg.label(px);
      if (label.is_background() || !depth.valid(px)) continue;
      if (label.value >= classes)
        throw InputError("segmentation label " + std::to_string(label.value) + " exceeds class count");
      const Vec3 world = r * backproject(cam, u, v, depth.values[px]) + t;
      const double unc = uncertainty ? uncertainty->values[px] : 0.0;
      const double sc = mean ? mean->plane(label.value)[px] : 0.0;
      cloud.parts[static_cast<std::size_t>(label.value)].push(world, unc, sc, static_cast<std::int32_t>(px));
    }
  }
  return cloud;
}

SceneCloud lift_scene(const DepthMap& depth, const SegmentationMap& seg, const CameraModel& cam) {
  check_shapes(depth, seg);
  cam.validate();
  SceneCloud scene;
  const Mat3 r = cam.camera_to_world.linear();
  const Vec3 t = cam.camera_to_world.translation();
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const std::size_t px = static_cast<std::size_t>(v) * depth.width + u;
      if (!depth.valid(px)) continue;
      scene.points.push_back(r * backproject(cam, u, v, depth.values[px]) + t);
      scene.labels.push_back(seg.label(px));
      scene.pixel.push_back(static_cast<std::int32_t>(px));
    }
  }
  return scene;
}

MeanProbability mean_probability(const ProbabilityStack& stack) {
  stack.validate();
  MeanProbability mean;
  mean.classes = stack.classes;
  mean.width = stack.width;
  mean.height = stack.height;
  const std::size_t n = stack.pixels();
  mean.data.assign(static_cast<std::size_t>(stack.classes) * n, 0.0);
  const auto& kt = simd::active_kernels();
  for (int c = 0; c < stack.classes; ++c) {
    double* acc = mean.data.data() + static_cast<std::size_t>(c) * n;
    for (int k = 0; k < stack.inferences; ++k) kt.accumulate(acc, stack.plane(k, c), n);
    kt.divide(acc, static_cast<double>(stack.inferences), n);
  }
  return mean;
}

SegmentationMap argmax_segmentation(const MeanProbability& mean) {
  if (mean.classes > 256) throw InputError("at most 256 classes fit an 8-bit label map");
  SegmentationMap seg(mean.width, mean.height);
  const std::size_t n = mean.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    double best_p = mean.plane(0)[i];
    for (int c = 1; c < mean.classes; ++c) {
      const double p = mean.plane(c)[i];
      if (p > best_p) {
        best_p = p;
        best = c;
      }
    }
    seg.values[i] = static_cast<std::uint8_t>(best);
  }
  return seg;
}

SegmentationMap argmax_segmentation(const ProbabilityStack& stack) {
  return argmax_segmentation(mean_probability(stack));
}

}  // namespace fus
