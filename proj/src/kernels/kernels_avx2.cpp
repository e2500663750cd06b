// Compiled with -mavx2; only reached after a runtime CPU check.
#if defined(FUS_HAVE_AVX2_TU)

#include <immintrin.h>

#include <limits>

#include "fus/kernels.hpp"

namespace fus::simd::detail {
namespace {

void accumulate_avx2(double* acc, const float* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d s = _mm256_cvtps_pd(_mm_loadu_ps(src + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), s));
  }
  for (; i < n; ++i) acc[i] += static_cast<double>(src[i]);
}

void divide_avx2(double* acc, double divisor, std::size_t n) {
  const __m256d d = _mm256_set1_pd(divisor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(acc + i, _mm256_div_pd(_mm256_loadu_pd(acc + i), d));
  for (; i < n; ++i) acc[i] /= divisor;
}

// Four queries per lane group against one broadcast reference point.
void nearest_sq_avx2(const PointsSoA& query, const PointsSoA& ref, double* out) {
  const std::size_t n = query.size();
  const std::size_t m = ref.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d qx = _mm256_loadu_pd(query.x.data() + i);
    const __m256d qy = _mm256_loadu_pd(query.y.data() + i);
    const __m256d qz = _mm256_loadu_pd(query.z.data() + i);
    __m256d best = _mm256_set1_pd(inf);
    for (std::size_t j = 0; j < m; ++j) {
      const __m256d dx = _mm256_sub_pd(qx, _mm256_set1_pd(ref.x[j]));
      const __m256d dy = _mm256_sub_pd(qy, _mm256_set1_pd(ref.y[j]));
      const __m256d dz = _mm256_sub_pd(qz, _mm256_set1_pd(ref.z[j]));
      const __m256d d2 =
          _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
      best = _mm256_min_pd(d2, best);
    }
    _mm256_storeu_pd(out + i, best);
  }
  for (; i < n; ++i) {
    double best = inf;
    for (std::size_t j = 0; j < m; ++j) {
      const double dx = query.x[i] - ref.x[j];
      const double dy = query.y[i] - ref.y[j];
      const double dz = query.z[i] - ref.z[j];
      const double d2 = dx * dx + dy * dy + dz * dz;
      best = d2 < best ? d2 : best;
    }
    out[i] = best;
  }
}

void update_min_sq_avx2(const PointsSoA& pts, double qx, double qy, double qz, double* min_sq) {
  const std::size_t n = pts.size();
  const __m256d vx = _mm256_set1_pd(qx);
  const __m256d vy = _mm256_set1_pd(qy);
  const __m256d vz = _mm256_set1_pd(qz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(pts.x.data() + i), vx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(pts.y.data() + i), vy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(pts.z.data() + i), vz);
    const __m256d d2 =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
    _mm256_storeu_pd(min_sq + i, _mm256_min_pd(d2, _mm256_loadu_pd(min_sq + i)));
  }
  for (; i < n; ++i) {
    const double dx = pts.x[i] - qx;
    const double dy = pts.y[i] - qy;
    const double dz = pts.z[i] - qz;
    const double d2 = dx * dx + dy * dy + dz * dz;
    min_sq[i] = d2 < min_sq[i] ? d2 : min_sq[i];
  }
}

}  // namespace

const KernelTable kAvx2Table{
    accumulate_avx2,
    divide_avx2,
    nearest_sq_avx2,
    update_min_sq_avx2,
};

}  // namespace fus::simd::detail

#endif
