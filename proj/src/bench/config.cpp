#include <cmath>
#include <set>

#include "fus/bench.hpp"
#include "fus/sequence_io.hpp"

namespace fus::bench {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw InputError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_opt(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError("field '" + where + "." + key + "' has the wrong type");
  }
}

std::vector<std::uint64_t> parse_seeds(const json& j) {
  std::vector<std::uint64_t> seeds;
  try {
    if (j.is_array()) {
      for (const auto& s : j) seeds.push_back(s.get<std::uint64_t>());
    } else if (j.is_object()) {
      reject_unknown(j, {"start", "count"}, "seeds");
      if (!j.contains("count")) throw InputError("missing required field 'seeds.count'");
      const auto start = j.value("start", std::uint64_t{0});
      const auto count = j.at("count").get<std::uint64_t>();
      for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(start + i);
    } else {
      seeds.push_back(j.get<std::uint64_t>());
    }
  } catch (const json::exception&) {
    throw InputError("field 'seeds' must be a non-negative integer, a list of them, or {start, count}");
  }
  return seeds;
}

}  // namespace

void RunConfig::validate() const {
  sampler.validate();
  noise.validate();
  if (scene.frames < 2) throw InputError("scene.frames must be at least 2");
  if (scene.handle_length && !(*scene.handle_length > 0.0))
    throw InputError("scene.handle_length must be positive");
  if (seeds.empty()) throw InputError("at least one seed is required");
  if (!(coverage_radius > 0.0) || !std::isfinite(coverage_radius))
    throw InputError("coverage_radius must be positive");
  if (workers < 1) throw InputError("workers must be at least 1");
  if (sequences.empty() && !scene.kind) throw InputError("missing required field 'scene.kind' (or 'sequences')");
}

RunConfig parse_run_config(const json& j) {
  reject_unknown(j, {"scene", "noise", "sampler", "strategies", "seeds", "coverage_radius", "workers",
                     "sequences", "out"},
                 "config");
  RunConfig cfg;
  if (j.contains("scene")) {
    const json& s = j.at("scene");
    reject_unknown(s, {"kind", "frames", "handle_length"}, "scene");
    if (s.contains("kind")) {
      std::string kind;
      read_opt(s, "kind", kind, "scene");
      cfg.scene.kind = sim::parse_kind(kind);
    }
    read_opt(s, "frames", cfg.scene.frames, "scene");
    if (s.contains("handle_length")) {
      double h = 0.0;
      read_opt(s, "handle_length", h, "scene");
      cfg.scene.handle_length = h;
    }
  }
  if (j.contains("noise")) cfg.noise = sim::noise_from_json(j.at("noise"));
  if (j.contains("sampler")) {
    const json& s = j.at("sampler");
    reject_unknown(s, {"points_per_part", "inferences", "queue_length", "decay", "downsample_total", "table_margin"},
                   "sampler");
    read_opt(s, "points_per_part", cfg.sampler.points_per_part, "sampler");
    read_opt(s, "inferences", cfg.sampler.inferences, "sampler");
    read_opt(s, "queue_length", cfg.sampler.queue_length, "sampler");
    read_opt(s, "decay", cfg.sampler.decay, "sampler");
    read_opt(s, "downsample_total", cfg.sampler.downsample_total, "sampler");
    read_opt(s, "table_margin", cfg.sampler.table_margin, "sampler");
  }
  if (j.contains("strategies")) {
    std::vector<std::string> names;
    read_opt(j, "strategies", names, "config");
    if (names.empty()) throw InputError("strategy list is empty");
    for (const auto& n : names) cfg.strategies.push_back(parse_strategy(n));
  }
  if (j.contains("seeds")) cfg.seeds = parse_seeds(j.at("seeds"));
  read_opt(j, "coverage_radius", cfg.coverage_radius, "config");
  read_opt(j, "workers", cfg.workers, "config");
  read_opt(j, "sequences", cfg.sequences, "config");
  read_opt(j, "out", cfg.out, "config");
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json j;
  json scene{{"frames", cfg.scene.frames}};
  if (cfg.scene.kind) scene["kind"] = std::string(sim::kind_name(*cfg.scene.kind));
  if (cfg.scene.handle_length) scene["handle_length"] = *cfg.scene.handle_length;
  j["scene"] = scene;
  j["noise"] = sim::to_json(cfg.noise);
  j["sampler"] = {{"points_per_part", cfg.sampler.points_per_part},
                  {"inferences", cfg.sampler.inferences},
                  {"queue_length", cfg.sampler.queue_length},
                  {"decay", cfg.sampler.decay},
                  {"downsample_total", cfg.sampler.downsample_total},
                  {"table_margin", cfg.sampler.table_margin}};
  if (!cfg.strategies.empty()) {
    json strategies = json::array();
    for (Strategy s : cfg.strategies) strategies.push_back(std::string(strategy_name(s)));
    j["strategies"] = strategies;
  }
  j["seeds"] = cfg.seeds;
  j["coverage_radius"] = cfg.coverage_radius;
  j["workers"] = cfg.workers;
  j["sequences"] = cfg.sequences;
  if (!cfg.out.empty()) j["out"] = cfg.out;
  return j;
}

sim::SceneSpec make_scene(const SceneConfig& cfg, std::uint64_t seed) {
  if (!cfg.kind) throw InputError("missing required field 'scene.kind'");
  sim::SceneSpec spec = sim::build_scene(*cfg.kind, seed, cfg.frames);
  if (cfg.handle_length) {
    spec.handle_length = *cfg.handle_length;
    sim::plan_trajectories(spec, cfg.frames);
    spec.validate();
  }
  return spec;
}

}  // namespace fus::bench
