// fus: generate synthetic sequences, sample them, score the samples and
// run strategy comparisons.
//
// Precedence: built-in defaults < --config file < command-line flags.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fus/bench.hpp"
#include "fus/io.hpp"
#include "fus/sequence_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> seed_count;
  std::string config;
  std::string out;
  std::optional<int> workers;
  std::string format = "csv";
  std::string kind;
  std::optional<int> frames;
  std::optional<double> handle_length;
  std::vector<std::string> sequences;
  std::string trajectory;
  std::string strategy;
  std::optional<std::vector<std::string>> strategies;
  bool ablation = false;
  bool oracle = false;
};

fus::bench::RunConfig load_config(const Flags& f) {
  fus::bench::RunConfig cfg;
  if (!f.config.empty()) {
    json j;
    try {
      j = json::parse(fus::io::read_text(f.config));
    } catch (const json::parse_error& e) {
      throw fus::InputError(f.config + ": " + e.what());
    }
    cfg = fus::bench::parse_run_config(j);
  }
  if (!f.kind.empty()) cfg.scene.kind = fus::sim::parse_kind(f.kind);
  if (f.frames) cfg.scene.frames = *f.frames;
  if (f.handle_length) cfg.scene.handle_length = *f.handle_length;
  if (f.seed) {
    cfg.seeds.clear();
    const std::uint64_t count = f.seed_count.value_or(1);
    for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(*f.seed + i);
  } else if (f.seed_count) {
    cfg.seeds.clear();
    for (std::uint64_t i = 0; i < *f.seed_count; ++i) cfg.seeds.push_back(i);
  }
  if (f.workers) cfg.workers = *f.workers;
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.sequences.empty()) cfg.sequences = f.sequences;
  if (f.ablation) {
    cfg.strategies = {fus::Strategy::kFus, fus::Strategy::kFusNoUncertainty, fus::Strategy::kFusNoConsistency};
  } else if (f.strategies) {
    cfg.strategies.clear();
    for (const auto& name : *f.strategies)
      if (!name.empty()) cfg.strategies.push_back(fus::parse_strategy(name));
    if (cfg.strategies.empty()) throw fus::InputError("strategy list is empty");
  }
  if (!f.strategy.empty()) cfg.strategies = {fus::parse_strategy(f.strategy)};
  return cfg;
}

void require_out(const fus::bench::RunConfig& cfg) {
  if (cfg.out.empty()) throw fus::InputError("missing required field 'out' (--out)");
}

int cmd_generate(const Flags& f) {
  auto cfg = load_config(f);
  cfg.validate();
  if (!cfg.scene.kind) throw fus::InputError("missing required field 'scene.kind' (--kind)");
  require_out(cfg);
  const std::uint64_t seed = cfg.seeds.front();
  cfg.seeds = {seed};
  const auto spec = fus::bench::make_scene(cfg.scene, seed);
  const auto seq = fus::sim::generate_sequence(spec, cfg.noise, cfg.sampler.inferences, seed);
  // The output location is not part of what gets reproduced.
  auto embedded = cfg;
  embedded.out.clear();
  fus::sim::write_sequence(seq, cfg.out, fus::bench::to_json(embedded));
  std::cout << "wrote " << seq.frames.size() << " frames to " << cfg.out << "\n";
  return 0;
}

int cmd_sample(const Flags& f) {
  auto cfg = load_config(f);
  if (cfg.sequences.size() != 1) throw fus::InputError("sample needs exactly one --sequence");
  cfg.validate();
  require_out(cfg);
  if (cfg.strategies.size() > 1) throw fus::InputError("sample takes a single strategy");
  fus::SamplerConfig sc = cfg.sampler;
  sc.strategy = cfg.strategies.empty() ? fus::Strategy::kFus : cfg.strategies.front();
  sc.seed = cfg.seeds.front();
  const auto seq = fus::sim::read_sequence(cfg.sequences.front());
  const auto frames = fus::bench::run_trajectory(seq, sc, f.oracle);
  json manifest;
  manifest["sequence"] = fs::absolute(cfg.sequences.front()).lexically_normal().string();
  manifest["classes"] = seq.classes();
  manifest["parts"] = seq.spec.part_names();
  manifest["seed"] = sc.seed;
  manifest["oracle_labels"] = f.oracle;
  auto embedded = cfg;
  embedded.out.clear();
  manifest["config"] = fus::bench::to_json(embedded);
  fus::bench::write_trajectory(frames, cfg.out, manifest);
  std::cout << "wrote " << frames.size() << " sampled frames to " << cfg.out << "\n";
  return 0;
}

int cmd_evaluate(const Flags& f) {
  auto cfg = load_config(f);
  if (cfg.sequences.size() != 1) throw fus::InputError("evaluate needs exactly one --sequence");
  if (f.trajectory.empty()) throw fus::InputError("missing required flag --trajectory");
  cfg.validate();
  require_out(cfg);
  const auto seq = fus::sim::read_sequence(cfg.sequences.front());
  fus::Strategy strategy{};
  const auto frames = fus::bench::read_trajectory(f.trajectory, &strategy);
  const json manifest = fus::sim::read_json(fs::path(f.trajectory) / "manifest.json");
  const auto seed = manifest.value("seed", std::uint64_t{0});
  fus::bench::CompareResult result;
  result.rows = fus::bench::evaluate_trajectory(seq, frames, cfg.sequences.front(), seed, strategy,
                                                cfg.coverage_radius);
  fus::bench::write_compare_outputs(result, cfg, cfg.out, f.format == "csv", f.format == "json");
  std::cout << "evaluated " << frames.size() << " frames into " << cfg.out << "\n";
  return 0;
}

int cmd_compare(const Flags& f) {
  auto cfg = load_config(f);
  cfg.validate();
  require_out(cfg);
  const auto result = fus::bench::run_compare(cfg);
  fus::bench::write_compare_outputs(result, cfg, cfg.out, true, true);
  for (const auto& failure : result.failures) std::cerr << "cell failed: " << failure << "\n";
  std::cout << result.rows.size() << " rows written to " << cfg.out << "\n";
  return result.failures.empty() ? 0 : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame-consistent uncertainty-aware point sampling benchmark"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(fus::kToolVersion));

  Flags f;
  app.add_option("--seed", f.seed, "Seed (first seed of a range with --seeds)");
  app.add_option("--config", f.config, "JSON run config")->check(CLI::ExistingFile);
  app.add_option("--out", f.out, "Output path");
  app.add_option("--workers", f.workers, "Worker threads for compare")->check(CLI::PositiveNumber);
  app.add_option("--format", f.format, "Metrics output format")->check(CLI::IsMember({"csv", "json"}));

  auto* gen = app.add_subcommand("generate", "Render a synthetic sequence directory");
  gen->add_option("--kind", f.kind, "door, drawer or faucet");
  gen->add_option("--frames", f.frames, "Frames per sequence");
  gen->add_option("--handle-length", f.handle_length, "Handle length override (m)");

  auto* sample = app.add_subcommand("sample", "Sample a sequence into a trajectory directory");
  sample->add_option("--sequence", f.sequences, "Sequence directory")->expected(1);
  sample->add_option("--strategy", f.strategy, "Sampling strategy");
  sample->add_flag("--oracle-labels", f.oracle, "Use ground-truth masks as segmentation");

  auto* eval = app.add_subcommand("evaluate", "Score a sampled trajectory against its sequence");
  eval->add_option("--sequence", f.sequences, "Sequence directory")->expected(1);
  eval->add_option("--trajectory", f.trajectory, "Sampled-trajectory directory");

  auto* cmp = app.add_subcommand("compare", "Run a strategy x seed grid");
  cmp->add_option("--kind", f.kind, "Generated scene kind");
  cmp->add_option("--frames", f.frames, "Frames per generated sequence");
  cmp->add_option("--handle-length", f.handle_length, "Handle length override (m)");
  cmp->add_option("--sequence", f.sequences, "Sequence directories instead of generated scenes");
  cmp->add_option("--seeds", f.seed_count, "Number of consecutive seeds");
  cmp->add_option("--strategies", f.strategies, "Comma-separated strategy names")->delimiter(',');
  cmp->add_flag("--ablation", f.ablation, "FUS and its two ablations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(f);
    if (*sample) return cmd_sample(f);
    if (*eval) return cmd_evaluate(f);
    if (*cmp) return cmd_compare(f);
  } catch (const fus::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fus::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
