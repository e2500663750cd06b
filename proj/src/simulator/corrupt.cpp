#include <algorithm>
#include <cmath>
#include <string>

#include "fus/simulator.hpp"

namespace fus::sim {

namespace {

constexpr std::uint64_t kDepthStream = 1;
constexpr std::uint64_t kBlobStream = 2;
constexpr std::uint64_t kInferenceStreamBase = 3;

struct Blob {
  double u = 0, v = 0, radius = 0;
  std::uint8_t label = 0;
};

std::optional<Blob> place_blob(const RenderedFrame& clean, const NoiseSpec& noise, int classes, PartId handle,
                               Rng& rng) {
  if (!(noise.blob_rate > 0.0) || rng.uniform() >= noise.blob_rate) return std::nullopt;
  const SegmentationMap& gt = clean.labels;
  const int w = gt.width, h = gt.height;
  std::vector<std::size_t> centers;
  Blob blob;
  if (noise.blob_target == BlobTarget::kHandleAdjacent) {
    std::vector<std::pair<int, int>> handle_px;
    int u0 = w, u1 = -1, v0 = h, v1 = -1;
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u)
        if (gt.at(u, v) == handle.value) {
          handle_px.emplace_back(u, v);
          u0 = std::min(u0, u), u1 = std::max(u1, u), v0 = std::min(v0, v), v1 = std::max(v1, v);
        }
    if (handle_px.empty()) return std::nullopt;
    const int reach = static_cast<int>(std::ceil(noise.blob_adjacency));
    const double reach2 = noise.blob_adjacency * noise.blob_adjacency;
    for (int v = std::max(0, v0 - reach); v <= std::min(h - 1, v1 + reach); ++v) {
      for (int u = std::max(0, u0 - reach); u <= std::min(w - 1, u1 + reach); ++u) {
        if (gt.at(u, v) == handle.value || !(clean.depth.at(u, v) > 0.0)) continue;
        for (const auto& [hu, hv] : handle_px) {
          const double du = u - hu, dv = v - hv;
          if (du * du + dv * dv <= reach2) {
            centers.push_back(static_cast<std::size_t>(v) * w + u);
            break;
          }
        }
      }
    }
    blob.label = static_cast<std::uint8_t>(handle.value);
  } else {
    for (std::size_t i = 0; i < gt.values.size(); ++i)
      if (gt.values[i] != 0) centers.push_back(i);
  }
  if (centers.empty()) return std::nullopt;
  const std::size_t c = centers[rng.below(centers.size())];
  blob.u = static_cast<double>(c % static_cast<std::size_t>(w));
  blob.v = static_cast<double>(c / static_cast<std::size_t>(w));
  blob.radius = rng.uniform(noise.blob_radius_min, noise.blob_radius_max);
  if (noise.blob_target == BlobTarget::kRandomPart) {
    if (classes < 3) return std::nullopt;
    // A part other than the one under the center.
    const int truth = gt.values[c];
    int pick = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(classes - 2)));
    if (pick >= truth) ++pick;
    blob.label = static_cast<std::uint8_t>(pick);
  }
  return blob;
}

void paint(SegmentationMap& labels, const Blob& blob, double radius) {
  const int r = static_cast<int>(std::ceil(radius));
  const int cu = static_cast<int>(blob.u), cv = static_cast<int>(blob.v);
  for (int v = std::max(0, cv - r); v <= std::min(labels.height - 1, cv + r); ++v)
    for (int u = std::max(0, cu - r); u <= std::min(labels.width - 1, cu + r); ++u) {
      const double du = u - blob.u, dv = v - blob.v;
      if (du * du + dv * dv <= radius * radius) labels.at(u, v) = blob.label;
    }
}

}  // namespace

std::string_view blob_target_name(BlobTarget t) {
  return t == BlobTarget::kHandleAdjacent ? "handle_adjacent" : "random_part";
}

BlobTarget parse_blob_target(std::string_view name) {
  if (name == "handle_adjacent") return BlobTarget::kHandleAdjacent;
  if (name == "random_part") return BlobTarget::kRandomPart;
  throw InputError("unknown blob target '" + std::string(name) + "' (expected handle_adjacent or random_part)");
}

NoiseSpec NoiseSpec::zero() {
  NoiseSpec n;
  n.depth_sigma = 0.0;
  n.salt_pepper_rate = 0.0;
  n.logit_sigma = 0.0;
  n.blob_rate = 0.0;
  n.boundary_jitter = 0;
  return n;
}

void NoiseSpec::validate() const {
  auto rate = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError(std::string("noise ") + what + " must lie in [0, 1]");
  };
  auto nonneg = [](double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError(std::string("noise ") + what + " must be >= 0");
  };
  nonneg(depth_sigma, "depth_sigma");
  rate(salt_pepper_rate, "salt_pepper_rate");
  if (!(max_range > 0.0) || !std::isfinite(max_range)) throw InputError("noise max_range must be positive");
  nonneg(logit_sigma, "logit_sigma");
  if (!(logit_margin > 0.0) || !std::isfinite(logit_margin)) throw InputError("noise logit_margin must be positive");
  rate(blob_rate, "blob_rate");
  nonneg(blob_radius_min, "blob_radius_min");
  if (!(blob_radius_max >= blob_radius_min) || !std::isfinite(blob_radius_max))
    throw InputError("noise blob_radius_max must be >= blob_radius_min");
  nonneg(blob_adjacency, "blob_adjacency");
  if (boundary_jitter < 0) throw InputError("noise boundary_jitter must be >= 0");
}

NoisyFrame corrupt(const RenderedFrame& clean, const NoiseSpec& noise, int inferences, int classes, PartId handle,
                   std::uint64_t seed, long frame) {
  noise.validate();
  if (inferences < 1) throw InputError("need at least one inference");
  if (classes < 2) throw InputError("need at least two classes");
  const int w = clean.labels.width, h = clean.labels.height;
  const auto f = static_cast<std::uint64_t>(frame);
  NoisyFrame out;

  // Depth: Gaussian on valid readings, then dropouts (0) and saturations
  // (max_range, which the map's cutoff marks invalid).
  out.depth = DepthMap(w, h, 0.0);
  out.depth.max_range = noise.max_range;
  Rng drng = Rng::stream(seed, f, kDepthStream);
  for (std::size_t i = 0; i < out.depth.values.size(); ++i) {
    double d = clean.depth.values[i];
    if (d > 0.0 && noise.depth_sigma > 0.0) d += noise.depth_sigma * drng.normal();
    if (noise.salt_pepper_rate > 0.0 && drng.uniform() < noise.salt_pepper_rate)
      d = drng.uniform() < 0.5 ? 0.0 : noise.max_range;
    out.depth.values[i] = d > 0.0 ? static_cast<double>(static_cast<float>(d)) : 0.0;
  }

  Rng brng = Rng::stream(seed, f, kBlobStream);
  const auto blob = place_blob(clean, noise, classes, handle, brng);
  out.blob_mask = SegmentationMap(w, h, 0);
  if (blob) {
    Blob core = *blob;
    core.label = 1;
    paint(out.blob_mask, core, blob->radius);
  }

  out.stack = ProbabilityStack(inferences, classes, w, h);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const double gap = noise.logit_sigma > 0.0 ? noise.logit_margin / noise.logit_sigma : 0.0;
  std::vector<double> logits(static_cast<std::size_t>(classes));
  for (int k = 0; k < inferences; ++k) {
    Rng krng = Rng::stream(seed, f, kInferenceStreamBase + static_cast<std::uint64_t>(k));
    const int j = noise.boundary_jitter;
    const int du = j > 0 ? static_cast<int>(krng.below(static_cast<std::uint64_t>(2 * j + 1))) - j : 0;
    const int dv = j > 0 ? static_cast<int>(krng.below(static_cast<std::uint64_t>(2 * j + 1))) - j : 0;
    SegmentationMap lab(w, h);
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u)
        lab.at(u, v) = clean.labels.at(std::clamp(u + du, 0, w - 1), std::clamp(v + dv, 0, h - 1));
    if (blob) paint(lab, *blob, std::max(0.5, blob->radius + krng.uniform(-1.0, 1.0)));

    for (std::size_t i = 0; i < n; ++i) {
      const int truth = std::min<int>(lab.values[i], classes - 1);
      if (noise.logit_sigma == 0.0) {
        for (int c = 0; c < classes; ++c) out.stack.plane(k, c)[i] = c == truth ? 1.0f : 0.0f;
        continue;
      }
      // Logit noise acts as a temperature on a fixed margin, so sigma -> 0
      // recovers the hard one-hot labels.
      double hi = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < classes; ++c) {
        logits[static_cast<std::size_t>(c)] = (c == truth ? gap : 0.0) + krng.normal();
        hi = std::max(hi, logits[static_cast<std::size_t>(c)]);
      }
      double sum = 0.0;
      for (double& z : logits) {
        z = std::exp(z - hi);
        sum += z;
      }
      for (int c = 0; c < classes; ++c)
        out.stack.plane(k, c)[i] = static_cast<float>(logits[static_cast<std::size_t>(c)] / sum);
    }
  }
  return out;
}

}  // namespace fus::sim
