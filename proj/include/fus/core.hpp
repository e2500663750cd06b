// Domain types shared by the sampling pipeline and the pixel-to-world lift.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Geometry>

namespace fus {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Rigid = Eigen::Isometry3d;

/// Raised when arguments violate an operation's preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for unreadable or corrupt files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Class index of a segmentation label. 0 is background and never sampled.
struct PartId {
  int value = 0;

  constexpr PartId() = default;
  constexpr explicit PartId(int v) : value(v) {}
  constexpr bool is_background() const { return value == 0; }
  friend constexpr bool operator==(PartId, PartId) = default;
  friend constexpr auto operator<=>(PartId, PartId) = default;
};

inline constexpr PartId kBackground{0};

/// Pinhole camera with a camera-to-world extrinsic.
struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  Rigid camera_to_world = Rigid::Identity();

  /// Throws InputError unless focal lengths are positive and the rotation is proper.
  void validate() const;
};

/// Row-major raster with a fixed size.
template <typename T>
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<T> values;

  Raster() = default;
  Raster(int w, int h, T fill = T{}) : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t size() const { return values.size(); }
  T& at(int u, int v) { return values[static_cast<std::size_t>(v) * width + u]; }
  const T& at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
  bool same_shape(int w, int h) const { return width == w && height == h; }
};

/// Metric depth per pixel. Non-positive or non-finite values are invalid;
/// a finite max_range, when set, also invalidates readings at or beyond it
/// (sensor saturation).
struct DepthMap : Raster<double> {
  using Raster<double>::Raster;
  double max_range = std::numeric_limits<double>::infinity();

  bool valid(std::size_t pixel) const {
    const double d = values[pixel];
    return std::isfinite(d) && d > 0.0 && d < max_range;
  }
};

struct SegmentationMap : Raster<std::uint8_t> {
  using Raster<std::uint8_t>::Raster;
  PartId label(std::size_t pixel) const { return PartId{values[pixel]}; }
};

/// K stochastic softmax maps over C classes (background included).
/// Storage is float, laid out [k][c][pixel], matching the on-disk format.
struct ProbabilityStack {
  int inferences = 0;  // K
  int classes = 0;     // C
  int width = 0;
  int height = 0;
  std::vector<float> data;

  ProbabilityStack() = default;
  ProbabilityStack(int k, int c, int w, int h)
      : inferences(k), classes(c), width(w), height(h),
        data(static_cast<std::size_t>(k) * c * w * h, 0.0f) {}

  std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
  float* plane(int k, int c) { return data.data() + (static_cast<std::size_t>(k) * classes + c) * pixels(); }
  const float* plane(int k, int c) const {
    return data.data() + (static_cast<std::size_t>(k) * classes + c) * pixels();
  }

  /// Throws InputError on shape errors, negative entries, all-zero pixels,
  /// or any probability vector whose sum is off by more than 1e-6.
  void validate() const;
};

/// Per-class mean over the K inferences, laid out [c][pixel].
struct MeanProbability {
  int classes = 0;
  int width = 0;
  int height = 0;
  std::vector<double> data;

  std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
  const double* plane(int c) const { return data.data() + static_cast<std::size_t>(c) * pixels(); }
};

/// Points lifted from one part's pixels, in world frame.
struct PartPoints {
  std::vector<Vec3> points;
  std::vector<double> uncertainty;  // normalized entropy at the source pixel
  std::vector<double> score;        // mean probability of this part at the source pixel
  std::vector<std::int32_t> pixel;  // row-major source pixel index

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  void reserve(std::size_t n);
  void push(const Vec3& p, double unc, double sc, std::int32_t px);
};

/// Lifted points grouped by part. Index 0 (background) stays empty.
struct PartPointCloud {
  std::vector<PartPoints> parts;

  int classes() const { return static_cast<int>(parts.size()); }
  const PartPoints& part(PartId id) const { return parts.at(static_cast<std::size_t>(id.value)); }
  PartPoints& part(PartId id) { return parts.at(static_cast<std::size_t>(id.value)); }
  std::size_t total_points() const;
};

/// All valid-depth points with their labels, background included.
struct SceneCloud {
  std::vector<Vec3> points;
  std::vector<PartId> labels;
  std::vector<std::int32_t> pixel;
};

/// Camera-frame point of pixel (u, v) at depth d.
Vec3 backproject(const CameraModel& cam, double u, double v, double depth);

/// Projects a world point; returns (u, v, depth).
Vec3 project(const CameraModel& cam, const Vec3& world);

/// Lifts every valid, non-background pixel to world frame and groups by
/// label. Uncertainty and score are zero unless the overload with those
/// rasters is used.
PartPointCloud lift_to_world(const DepthMap& depth, const SegmentationMap& seg, const CameraModel& cam,
                             int classes);

PartPointCloud lift_to_world(const DepthMap& depth, const SegmentationMap& seg, const CameraModel& cam,
                             int classes, const Raster<double>* uncertainty, const MeanProbability* mean);

/// Lifts every valid pixel, background included.
SceneCloud lift_scene(const DepthMap& depth, const SegmentationMap& seg, const CameraModel& cam);

/// Per-class mean of the stack (validates first).
MeanProbability mean_probability(const ProbabilityStack& stack);

/// Label = argmax of the mean map; ties go to the lowest class index.
SegmentationMap argmax_segmentation(const ProbabilityStack& stack);
SegmentationMap argmax_segmentation(const MeanProbability& mean);

}  // namespace fus
