// Benchmark harness: run configs, trajectory evaluation and the
// strategy x seed comparison grid.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "fus/sampler.hpp"
#include "fus/simulator.hpp"

namespace fus::bench {

struct SceneConfig {
  std::optional<sim::ObjectKind> kind;
  int frames = 20;
  std::optional<double> handle_length;  // overrides the randomized value
};

/// Everything a CLI run needs. Parsed strictly: unknown keys are rejected.
struct RunConfig {
  SceneConfig scene;
  sim::NoiseSpec noise;
  SamplerConfig sampler;
  std::vector<Strategy> strategies;
  std::vector<std::uint64_t> seeds{0};
  double coverage_radius = 0.01;
  int workers = 1;
  std::vector<std::string> sequences;
  std::string out;

  void validate() const;
};

RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

/// Scene spec for a generated run: build_scene plus overrides.
sim::SceneSpec make_scene(const SceneConfig& cfg, std::uint64_t seed);

/// Samples every frame of a sequence in order with a fresh queue.
/// `oracle_labels` feeds ground-truth masks instead of the argmax map.
std::vector<SampledFrame> run_trajectory(const sim::SceneSequence& seq, const SamplerConfig& cfg,
                                         bool oracle_labels = false);

struct FrameRow {
  std::string scene;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::kFus;
  long frame = 0;
  int part = 0;
  std::string part_name;
  std::size_t points = 0;
  bool fallback = false;
  std::optional<double> chamfer;
  std::optional<double> consistency;  // pair (frame-1 -> frame); empty on frame 0
  std::optional<double> contamination;
  std::optional<double> coverage;
};

/// One row per frame x part (ids >= 1).
std::vector<FrameRow> evaluate_trajectory(const sim::SceneSequence& seq, const std::vector<SampledFrame>& frames,
                                          const std::string& scene_label, std::uint64_t seed, Strategy strategy,
                                          double coverage_radius);

struct CompareResult {
  std::vector<FrameRow> rows;
  std::vector<std::string> failures;  // one message per failed cell
};

/// Full grid. Generated scenes use `seed` for scene, noise and sampler;
/// sequence directories use it for the sampler only. Rows are ordered by
/// (source, seed, strategy, frame, part) regardless of worker count.
CompareResult run_compare(const RunConfig& cfg);

std::string rows_to_csv(const std::vector<FrameRow>& rows);

enum class Metric { kChamfer, kConsistency, kContamination, kCoverage };
const char* metric_name(Metric m);
std::optional<double> metric_value(const FrameRow& row, Metric m);

/// Key: (scene, strategy, part name, seed) -> mean over frames.
using SeedKey = std::tuple<std::string, std::string, std::string, std::uint64_t>;
std::map<SeedKey, double> per_seed_means(const std::vector<FrameRow>& rows, Metric m);

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
  std::size_t count = 0;
};
Aggregate aggregate(std::vector<double> values);

/// Aggregate tables: per (scene, strategy, part), each metric's mean/std/
/// median over per-seed means.
nlohmann::json summarize(const CompareResult& result, const RunConfig& cfg);

/// Writes metrics.csv and/or summary.json into `dir` (created if needed).
void write_compare_outputs(const CompareResult& result, const RunConfig& cfg, const std::filesystem::path& dir,
                           bool csv, bool json);

/// Sampled-trajectory directory: frame_NNNN.ply (x, y, z, part, weight,
/// pixel) plus manifest.json.
void write_trajectory(const std::vector<SampledFrame>& frames, const std::filesystem::path& dir,
                      const nlohmann::json& manifest);
std::vector<SampledFrame> read_trajectory(const std::filesystem::path& dir, Strategy* strategy = nullptr);

}  // namespace fus::bench
