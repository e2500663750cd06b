// Data-parallel inner loops with a scalar reference and SIMD variants.
//
// Every variant must produce bit-identical results to the scalar reference:
// the build disables FP contraction and each kernel keeps the scalar
// operation order per lane.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fus/core.hpp"

namespace fus::simd {

enum class Isa { kScalar, kAvx2 };

const char* isa_name(Isa isa);

/// True when this binary carries the variant and the CPU can run it.
bool isa_supported(Isa isa);

/// Widest supported ISA. FUS_ISA=scalar|avx2 in the environment overrides it.
Isa best_isa();

/// ISA used by the free-function wrappers below. Process-wide.
Isa active_isa();
void set_active_isa(Isa isa);

/// Structure-of-arrays copy of a point set.
struct PointsSoA {
  std::vector<double> x, y, z;

  PointsSoA() = default;
  explicit PointsSoA(std::span<const Vec3> pts);
  std::size_t size() const { return x.size(); }
  void push(const Vec3& p) {
    x.push_back(p.x());
    y.push_back(p.y());
    z.push_back(p.z());
  }
};

struct KernelTable {
  /// acc[i] += src[i]
  void (*accumulate)(double* acc, const float* src, std::size_t n);
  /// acc[i] /= divisor
  void (*divide)(double* acc, double divisor, std::size_t n);
  /// out[i] = min_j |query_i - ref_j|^2, +inf when ref is empty
  void (*nearest_sq)(const PointsSoA& query, const PointsSoA& ref, double* out);
  /// min_sq[i] = min(min_sq[i], |p_i - q|^2)
  void (*update_min_sq)(const PointsSoA& pts, double qx, double qy, double qz, double* min_sq);
};

const KernelTable& kernels(Isa isa);

inline const KernelTable& active_kernels() { return kernels(active_isa()); }

/// Squared nearest-neighbour distances from every query to the reference set.
std::vector<double> nearest_sq_distances(const PointsSoA& query, const PointsSoA& ref);

/// Euclidean nearest-neighbour distances from every query to the reference set.
std::vector<double> nearest_distances(std::span<const Vec3> query, std::span<const Vec3> ref);

namespace detail {
extern const KernelTable kScalarTable;
#if defined(FUS_HAVE_AVX2_TU)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace fus::simd
