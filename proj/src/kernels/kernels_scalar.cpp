#include <limits>

#include "fus/kernels.hpp"

namespace fus::simd::detail {
namespace {

void accumulate_scalar(double* acc, const float* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(src[i]);
}

void divide_scalar(double* acc, double divisor, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] /= divisor;
}

void nearest_sq_scalar(const PointsSoA& query, const PointsSoA& ref, double* out) {
  const std::size_t n = query.size();
  const std::size_t m = ref.size();
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    const double qx = query.x[i], qy = query.y[i], qz = query.z[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double dx = qx - ref.x[j];
      const double dy = qy - ref.y[j];
      const double dz = qz - ref.z[j];
      const double d2 = dx * dx + dy * dy + dz * dz;
      best = d2 < best ? d2 : best;
    }
    out[i] = best;
  }
}

void update_min_sq_scalar(const PointsSoA& pts, double qx, double qy, double qz, double* min_sq) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = pts.x[i] - qx;
    const double dy = pts.y[i] - qy;
    const double dz = pts.z[i] - qz;
    const double d2 = dx * dx + dy * dy + dz * dz;
    min_sq[i] = d2 < min_sq[i] ? d2 : min_sq[i];
  }
}

}  // namespace

const KernelTable kScalarTable{
    accumulate_scalar,
    divide_scalar,
    nearest_sq_scalar,
    update_min_sq_scalar,
};

}  // namespace fus::simd::detail
