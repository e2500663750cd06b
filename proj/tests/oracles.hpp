// Independent brute-force reimplementations used as test oracles.
// Deliberately naive: plain loops, long double where it helps, no shared
// code with the library beyond the point type.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "fus/core.hpp"

namespace oracle {

using fus::Vec3;

/// probs[k][c] for one pixel; returns entropy / log(C).
inline double entropy(const std::vector<std::vector<double>>& probs) {
  const std::size_t K = probs.size();
  const std::size_t C = probs.front().size();
  long double h = 0.0L;
  for (std::size_t c = 0; c < C; ++c) {
    long double mean = 0.0L;
    for (std::size_t k = 0; k < K; ++k) mean += probs[k][c];
    mean /= static_cast<long double>(K);
    if (mean > 0.0L) h -= mean * std::log(mean);
  }
  const long double norm = h / std::log(static_cast<long double>(C));
  return static_cast<double>(std::clamp(norm, 0.0L, 1.0L));
}

inline std::vector<double> softmax(const std::vector<double>& u) {
  long double z = 0.0L;
  for (double x : u) z += std::exp(static_cast<long double>(x));
  std::vector<double> out;
  for (double x : u) out.push_back(static_cast<double>(std::exp(static_cast<long double>(x)) / z));
  return out;
}

inline double decay(double d, double k) { return static_cast<double>(std::pow(2.0L, -static_cast<long double>(k) * d)); }

inline double dist(const Vec3& a, const Vec3& b) {
  const long double dx = a.x() - b.x(), dy = a.y() - b.y(), dz = a.z() - b.z();
  return static_cast<double>(std::sqrt(dx * dx + dy * dy + dz * dz));
}

inline double nn(const Vec3& q, const std::vector<Vec3>& ref) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : ref) best = std::min(best, dist(q, r));
  return best;
}

inline double mean_nn(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  long double s = 0.0L;
  for (const auto& p : from) s += nn(p, to);
  return static_cast<double>(s / static_cast<long double>(from.size()));
}

inline double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) { return mean_nn(a, b) + mean_nn(b, a); }

inline double coverage(const std::vector<Vec3>& sampled, const std::vector<Vec3>& ref, double r) {
  std::size_t hit = 0;
  for (const auto& p : ref) {
    bool covered = false;
    for (const auto& s : sampled) covered = covered || dist(p, s) <= r;
    hit += covered ? 1 : 0;
  }
  return static_cast<double>(hit) / static_cast<double>(ref.size());
}

/// Exact inclusion probabilities of successive weighted draws without
/// replacement, by enumerating every ordered draw sequence.
inline std::vector<double> inclusion(const std::vector<double>& w, int draws) {
  const std::size_t n = w.size();
  std::vector<double> incl(n, 0.0);
  std::vector<bool> taken(n, false);
  std::function<void(int, double)> rec = [&](int left, double prob) {
    if (left == 0) {
      for (std::size_t i = 0; i < n; ++i)
        if (taken[i]) incl[i] += prob;
      return;
    }
    double rest = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!taken[i]) rest += w[i];
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i] || w[i] == 0.0) continue;
      taken[i] = true;
      rec(left - 1, prob * w[i] / rest);
      taken[i] = false;
    }
  };
  rec(draws, 1.0);
  return incl;
}

}  // namespace oracle
