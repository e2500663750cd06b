#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "fus/kernels.hpp"
#include "fus/sampler.hpp"

namespace fus {

namespace {

struct StrategyName {
  Strategy strategy;
  std::string_view name;
};

constexpr StrategyName kNames[] = {
    {Strategy::kFus, "FUS"},
    {Strategy::kFusNoUncertainty, "FUS-no-uncertainty"},
    {Strategy::kFusNoConsistency, "FUS-no-consistency"},
    {Strategy::kRandom, "Random"},
    {Strategy::kFps, "FPS"},
    {Strategy::kScoreBased, "ScoreBased"},
    {Strategy::kUniformDownsample, "UniformDownsample"},
};

void pad_with_last(std::vector<std::size_t>& picks, int count) {
  while (!picks.empty() && picks.size() < static_cast<std::size_t>(count)) picks.push_back(picks.back());
}

std::size_t draw_proportional(std::span<const double> weights, double total, Rng& rng) {
  if (total <= 0.0) return static_cast<std::size_t>(rng.below(weights.size()));
  const double target = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc && weights[i] > 0.0) return i;
  }
  // Rounding left target at the top of the range: take the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return weights.size() - 1;
}

}  // namespace

std::string_view strategy_name(Strategy s) {
  for (const auto& n : kNames)
    if (n.strategy == s) return n.name;
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (const auto& n : kNames)
    if (n.name == name) return n.strategy;
  throw InputError("unknown strategy '" + std::string(name) + "'");
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all = [] {
    std::vector<Strategy> v;
    for (const auto& n : kNames) v.push_back(n.strategy);
    return v;
  }();
  return all;
}

void SamplerConfig::validate() const {
  if (points_per_part < 1) throw InputError("points_per_part must be at least 1");
  if (inferences < 1) throw InputError("inferences must be at least 1");
  if (queue_length < 1) throw InputError("queue_length must be at least 1");
  if (!(decay > 0.0) || !std::isfinite(decay)) throw InputError("decay must be positive");
  if (downsample_total < 1) throw InputError("downsample_total must be at least 1");
  if (!(table_margin >= 0.0)) throw InputError("table_margin must be non-negative");
}

std::size_t SampledFrame::total_points() const {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.size();
  return n;
}

int SampledFrame::parts_present() const {
  int n = 0;
  for (std::size_t c = 1; c < parts.size(); ++c) n += parts[c].size() > 0 ? 1 : 0;
  return n;
}

std::vector<double> encode_features(const SampledFrame& frame, int classes) {
  const std::size_t width = 3 + static_cast<std::size_t>(std::max(classes - 1, 0));
  std::vector<double> out;
  for (std::size_t c = 1; c < frame.parts.size(); ++c) {
    if (static_cast<int>(c) >= classes) throw InputError("sampled part id exceeds class count");
    for (const Vec3& p : frame.parts[c].points) {
      const std::size_t row = out.size();
      out.resize(row + width, 0.0);
      out[row] = p.x();
      out[row + 1] = p.y();
      out[row + 2] = p.z();
      out[row + 3 + (c - 1)] = 1.0;
    }
  }
  return out;
}

std::vector<double> combine_weights(std::span<const double> uncertainty_weights,
                                    std::span<const double> consistency_weights) {
  if (uncertainty_weights.size() != consistency_weights.size())
    throw InputError("weight vectors differ in length: " + std::to_string(uncertainty_weights.size()) + " vs " +
                     std::to_string(consistency_weights.size()));
  std::vector<double> w(uncertainty_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = consistency_weights[i] * uncertainty_weights[i];
  return w;
}

PartWeights combine_weights(const PartWeights& uncertainty_weights, const PartWeights& consistency_weights) {
  if (uncertainty_weights.parts.size() != consistency_weights.parts.size())
    throw InputError("weight sets cover different part counts");
  PartWeights out;
  out.parts.reserve(uncertainty_weights.parts.size());
  for (std::size_t c = 0; c < uncertainty_weights.parts.size(); ++c)
    out.parts.push_back(combine_weights(uncertainty_weights.parts[c], consistency_weights.parts[c]));
  return out;
}

std::vector<std::size_t> weighted_sample(std::span<const double> weights, int count, Rng& rng) {
  if (count < 0) throw InputError("sample count must be non-negative");
  double total = 0.0;
  std::size_t positive = 0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("sampling weights must be finite and non-negative");
    total += w;
    positive += w > 0.0 ? 1 : 0;
  }
  const std::size_t n = weights.size();
  const auto want = static_cast<std::size_t>(count);
  std::vector<std::size_t> picks;
  picks.reserve(want);
  if (n == 0 || want == 0) return picks;

  if (n <= want) {
    for (std::size_t i = 0; i < n; ++i) picks.push_back(i);
    while (picks.size() < want) picks.push_back(draw_proportional(weights, total, rng));
    return picks;
  }
  if (positive == 0) throw InputError("all sampling weights are zero");

  // Exponential keys -log(U)/w: ascending key order has the law of
  // successive draws proportional to the remaining weight.
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform_pos();
    if (weights[i] > 0.0) keys.emplace_back(-std::log(u) / weights[i], i);
  }
  const std::size_t take = std::min(want, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(take), keys.end());
  for (std::size_t i = 0; i < take; ++i) picks.push_back(keys[i].second);

  if (picks.size() < want) {
    std::vector<std::pair<double, std::size_t>> rest;
    for (std::size_t i = 0; i < n; ++i)
      if (weights[i] == 0.0) rest.emplace_back(rng.uniform(), i);
    const std::size_t more = want - picks.size();
    std::partial_sort(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(more), rest.end());
    for (std::size_t i = 0; i < more; ++i) picks.push_back(rest[i].second);
  }
  return picks;
}

std::vector<std::size_t> fps_sample(std::span<const Vec3> candidates, int count) {
  if (candidates.empty()) throw InputError("farthest point sampling needs at least one candidate");
  if (count < 1) return {};
  const std::size_t n = candidates.size();
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : candidates) centroid += p;
  centroid /= static_cast<double>(n);

  const simd::PointsSoA soa(candidates);
  std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
  simd::active_kernels().update_min_sq(soa, centroid.x(), centroid.y(), centroid.z(), min_sq.data());

  std::vector<std::size_t> picks;
  const std::size_t want = std::min(static_cast<std::size_t>(count), n);
  picks.reserve(static_cast<std::size_t>(count));
  // The first pick maximizes distance to the centroid; later picks maximize
  // distance to the picked set. Picked points are parked at -1.
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (min_sq[i] > min_sq[best]) best = i;
  picks.push_back(best);
  std::fill(min_sq.begin(), min_sq.end(), std::numeric_limits<double>::infinity());
  const auto& kt = simd::active_kernels();
  while (picks.size() < want) {
    const Vec3& q = candidates[picks.back()];
    min_sq[picks.back()] = -1.0;
    kt.update_min_sq(soa, q.x(), q.y(), q.z(), min_sq.data());
    best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (min_sq[i] > min_sq[best]) best = i;
    picks.push_back(best);
  }
  pad_with_last(picks, count);
  return picks;
}

std::vector<std::size_t> score_sample(std::span<const double> scores, int count) {
  if (scores.empty()) throw InputError("score sampling needs at least one candidate");
  if (count < 1) return {};
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t take = std::min(static_cast<std::size_t>(count), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); });
  order.resize(take);
  pad_with_last(order, count);
  return order;
}

std::vector<std::size_t> uniform_downsample(const SceneCloud& scene, double table_z, double margin, int total,
                                            Rng& rng) {
  if (total < 0) throw InputError("downsample total must be non-negative");
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < scene.points.size(); ++i)
    if (scene.points[i].z() > table_z + margin) survivors.push_back(i);
  const auto want = static_cast<std::size_t>(total);
  if (survivors.size() <= want) return survivors;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < want; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(survivors.size() - i));
    std::swap(survivors[i], survivors[j]);
  }
  survivors.resize(want);
  return survivors;
}

std::vector<double> fus_part_weights(const PartPoints& candidates, const SampleQueue& queue, PartId part,
                                     const SamplerConfig& cfg, bool initial) {
  const std::size_t n = candidates.size();
  const bool uses_queue = cfg.strategy == Strategy::kFus || cfg.strategy == Strategy::kFusNoUncertainty;
  if (uses_queue && initial) return std::vector<double>(n, 1.0);

  std::vector<double> w_ua = cfg.strategy == Strategy::kFusNoUncertainty ? std::vector<double>(n, 1.0)
                                                                          : uncertainty_weights(candidates.uncertainty);
  std::vector<double> w_fc =
      cfg.strategy == Strategy::kFusNoConsistency
          ? std::vector<double>(n, 1.0)
          : consistency_weights(distance_to_queue(candidates.points, queue, part), cfg.decay);
  auto w = combine_weights(w_ua, w_fc);
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) return w_ua;
  return w;
}

SampledFrame sample_frame(const FrameInput& input, SampleQueue& queue, const SamplerConfig& cfg) {
  cfg.validate();
  if (!input.cloud) throw InputError("sample_frame needs a part point cloud");
  const PartPointCloud& cloud = *input.cloud;
  SampledFrame out;
  out.frame = input.frame;
  out.strategy = cfg.strategy;
  const int classes = cloud.classes();

  if (cfg.strategy == Strategy::kUniformDownsample) {
    if (!input.scene) throw InputError("UniformDownsample needs the scene cloud");
    const SceneCloud& scene = *input.scene;
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(input.frame), 0, 1);
    const auto picks = uniform_downsample(scene, input.table_z, cfg.table_margin, cfg.downsample_total, rng);
    int max_label = classes - 1;
    for (std::size_t i : picks) max_label = std::max(max_label, scene.labels[i].value);
    out.parts.resize(static_cast<std::size_t>(max_label) + 1);
    for (std::size_t i : picks) {
      auto& ps = out.parts[static_cast<std::size_t>(scene.labels[i].value)];
      ps.points.push_back(scene.points[i]);
      ps.weights.push_back(1.0);
      ps.pixel.push_back(scene.pixel[i]);
    }
    return out;
  }

  out.parts.resize(static_cast<std::size_t>(std::max(classes, 1)));
  const bool initial = queue.empty();
  PartSampleSets drawn;
  drawn.parts.resize(out.parts.size());
  for (int c = 1; c < classes; ++c) {
    const PartId part{c};
    const PartPoints& cand = cloud.part(part);
    PartSample& ps = out.parts[static_cast<std::size_t>(c)];
    if (cand.empty()) {
      if (const QueueEntry* last = queue.latest(part)) {
        ps.points = last->points;
        ps.weights.assign(ps.points.size(), 0.0);
        ps.pixel.assign(ps.points.size(), -1);
        ps.fallback = true;
      }
      continue;
    }

    std::vector<std::size_t> picks;
    std::vector<double> weights;
    switch (cfg.strategy) {
      case Strategy::kRandom: {
        Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(input.frame), static_cast<std::uint64_t>(c));
        weights.assign(cand.size(), 1.0);
        picks = weighted_sample(weights, cfg.points_per_part, rng);
        break;
      }
      case Strategy::kFus:
      case Strategy::kFusNoUncertainty:
      case Strategy::kFusNoConsistency: {
        Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(input.frame), static_cast<std::uint64_t>(c));
        weights = fus_part_weights(cand, queue, part, cfg, initial);
        picks = weighted_sample(weights, cfg.points_per_part, rng);
        break;
      }
      case Strategy::kFps:
        picks = fps_sample(cand.points, cfg.points_per_part);
        weights.assign(cand.size(), 1.0);
        break;
      case Strategy::kScoreBased:
        picks = score_sample(cand.score, cfg.points_per_part);
        weights = cand.score;
        break;
      case Strategy::kUniformDownsample:
        break;
    }
    ps.points.reserve(picks.size());
    for (std::size_t i : picks) {
      ps.points.push_back(cand.points[i]);
      ps.weights.push_back(weights[i]);
      ps.pixel.push_back(cand.pixel[i]);
    }
    drawn.parts[static_cast<std::size_t>(c)] = ps.points;
  }
  push_samples(queue, drawn, input.frame);
  return out;
}

}  // namespace fus
