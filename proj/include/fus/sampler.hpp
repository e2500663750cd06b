// Per-part point sampling: frame-consistent uncertainty-aware weighting
// plus the baseline strategies it is compared against.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fus/consistency.hpp"
#include "fus/core.hpp"
#include "fus/rng.hpp"
#include "fus/uncertainty.hpp"

namespace fus {

enum class Strategy {
  kFus,
  kFusNoUncertainty,
  kFusNoConsistency,
  kRandom,
  kFps,
  kScoreBased,
  kUniformDownsample,
};

std::string_view strategy_name(Strategy s);
/// Throws InputError for unknown names.
Strategy parse_strategy(std::string_view name);
const std::vector<Strategy>& all_strategies();

struct SamplerConfig {
  int points_per_part = 32;    // N_s
  int inferences = 4;          // K
  int queue_length = 3;        // T_fc
  double decay = 40.0;         // K_fc, 1/m
  Strategy strategy = Strategy::kFus;
  int downsample_total = 1024;
  double table_margin = 0.005;  // m above the table plane still counted as table
  std::uint64_t seed = 0;

  void validate() const;
};

/// Points drawn for one part in one frame.
struct PartSample {
  std::vector<Vec3> points;
  std::vector<double> weights;      // combined sampling weight of each pick; 0 for fallback picks
  std::vector<std::int32_t> pixel;  // source pixel, -1 when reused from the queue
  bool fallback = false;            // reused the part's latest queue entry

  std::size_t size() const { return points.size(); }
};

struct SampledFrame {
  long frame = 0;
  Strategy strategy = Strategy::kFus;
  /// Index = part id. UniformDownsample fills index 0 with background picks.
  std::vector<PartSample> parts;

  std::size_t total_points() const;
  /// Parts (id >= 1) with at least one point.
  int parts_present() const;
};

/// Row-major [x, y, z, one-hot over parts 1..classes-1] features of every
/// sampled point, parts in id order. Background picks are skipped.
std::vector<double> encode_features(const SampledFrame& frame, int classes);

/// w = w_fc * w_ua elementwise, no renormalization. Lengths must match.
std::vector<double> combine_weights(std::span<const double> uncertainty_weights,
                                    std::span<const double> consistency_weights);
PartWeights combine_weights(const PartWeights& uncertainty_weights, const PartWeights& consistency_weights);

/// Draws `count` indices in proportion to `weights`.
///
/// With at least `count` candidates the draw is without replacement:
/// successive picks with probability proportional to the remaining weight
/// (exponential-key form). Zero-weight candidates are only reached after
/// every positive one is taken, uniformly among themselves. With fewer
/// candidates than `count`, every candidate is taken once in index order and
/// the rest is drawn with replacement in proportion to weight.
/// Throws InputError on negative/non-finite weights or when all weights are
/// zero while more candidates than `count` exist.
std::vector<std::size_t> weighted_sample(std::span<const double> weights, int count, Rng& rng);

/// Farthest point sampling seeded at the candidate farthest from the
/// centroid; ties go to the lowest index. Short lists are padded by
/// repeating the last pick. Throws on empty input.
std::vector<std::size_t> fps_sample(std::span<const Vec3> candidates, int count);

/// Top `count` by score, ties toward the lower index, padded like fps_sample.
std::vector<std::size_t> score_sample(std::span<const double> scores, int count);

/// Drops points with z <= table_z + margin, then takes a uniform random
/// subset of `total` survivors (all of them when fewer remain).
std::vector<std::size_t> uniform_downsample(const SceneCloud& scene, double table_z, double margin, int total,
                                            Rng& rng);

/// Everything sampling needs from one observed frame.
struct FrameInput {
  long frame = 0;
  const PartPointCloud* cloud = nullptr;  // candidates with uncertainty and score
  const SceneCloud* scene = nullptr;      // required by UniformDownsample only
  double table_z = 0.0;
};

/// Samples one frame with cfg.strategy and pushes the drawn sets into the
/// queue. Part c draws from Rng::stream(cfg.seed, frame, c).
SampledFrame sample_frame(const FrameInput& input, SampleQueue& queue, const SamplerConfig& cfg);

/// Weights FUS (or an ablation) would use for one part, before sampling.
/// `initial` selects the uniform first-frame rule.
std::vector<double> fus_part_weights(const PartPoints& candidates, const SampleQueue& queue, PartId part,
                                     const SamplerConfig& cfg, bool initial);

}  // namespace fus
