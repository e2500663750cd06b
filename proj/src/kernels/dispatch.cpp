#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "fus/kernels.hpp"

namespace fus::simd {
namespace {

bool cpu_has_avx2() {
#if defined(FUS_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  const Isa widest = cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
  if (const char* env = std::getenv("FUS_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::kScalar;
    if (std::strcmp(env, "avx2") == 0 && isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  }
  return widest;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return cpu_has_avx2();
  }
  return false;
}

Isa best_isa() { return detect(); }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw InputError(std::string("ISA not supported on this machine: ") + isa_name(isa));
  active().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels(Isa isa) {
#if defined(FUS_HAVE_AVX2_TU)
  if (isa == Isa::kAvx2 && cpu_has_avx2()) return detail::kAvx2Table;
#endif
  (void)isa;
  return detail::kScalarTable;
}

PointsSoA::PointsSoA(std::span<const Vec3> pts) {
  x.resize(pts.size());
  y.resize(pts.size());
  z.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    x[i] = pts[i].x();
    y[i] = pts[i].y();
    z[i] = pts[i].z();
  }
}

std::vector<double> nearest_sq_distances(const PointsSoA& query, const PointsSoA& ref) {
  std::vector<double> out(query.size());
  active_kernels().nearest_sq(query, ref, out.data());
  return out;
}

std::vector<double> nearest_distances(std::span<const Vec3> query, std::span<const Vec3> ref) {
  auto out = nearest_sq_distances(PointsSoA(query), PointsSoA(ref));
  for (double& d : out) d = std::sqrt(d);
  return out;
}

}  // namespace fus::simd
