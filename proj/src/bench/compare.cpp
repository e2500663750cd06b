#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "fus/bench.hpp"
#include "fus/io.hpp"
#include "fus/metrics.hpp"
#include "fus/pipeline.hpp"
#include "fus/sequence_io.hpp"

namespace fus::bench {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<SampledFrame> run_trajectory(const sim::SceneSequence& seq, const SamplerConfig& cfg, bool oracle_labels) {
  SamplingSession session(cfg);
  std::vector<SampledFrame> out;
  out.reserve(seq.frames.size());
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const auto& f = seq.frames[t];
    out.push_back(session.step(static_cast<long>(t), f.depth, f.stack, f.camera, seq.spec.table_z,
                               oracle_labels ? &f.ground_truth : nullptr));
  }
  return out;
}

std::vector<FrameRow> evaluate_trajectory(const sim::SceneSequence& seq, const std::vector<SampledFrame>& frames,
                                          const std::string& scene_label, std::uint64_t seed, Strategy strategy,
                                          double coverage_radius) {
  if (frames.size() != seq.frames.size()) throw InputError("trajectory and sequence differ in frame count");
  const int classes = seq.classes();
  const auto names = seq.spec.part_names();
  static const std::vector<Vec3> kNone;
  auto points_of = [&](const SampledFrame& f, int c) -> const std::vector<Vec3>& {
    return static_cast<std::size_t>(c) < f.parts.size() ? f.parts[static_cast<std::size_t>(c)].points : kNone;
  };

  std::vector<FrameRow> rows;
  rows.reserve(frames.size() * static_cast<std::size_t>(classes - 1));
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto& sf = frames[t];
    const auto& seq_frame = seq.frames[t];
    const auto visible = sim::visible_reference(seq_frame, classes);
    const auto contamination = metrics::contamination(sf, seq_frame.ground_truth);
    for (int c = 1; c < classes; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      FrameRow row;
      row.scene = scene_label;
      row.seed = seed;
      row.strategy = strategy;
      row.frame = static_cast<long>(t);
      row.part = c;
      row.part_name = names[uc];
      const auto& pts = points_of(sf, c);
      row.points = pts.size();
      row.fallback = uc < sf.parts.size() && sf.parts[uc].fallback;
      row.chamfer = metrics::chamfer(pts, visible[uc]);
      row.coverage = metrics::coverage(pts, visible[uc], coverage_radius);
      if (uc < contamination.size()) row.contamination = contamination[uc];
      if (t > 0)
        row.consistency = metrics::pair_consistency(points_of(frames[t - 1], c), pts,
                                                    seq.frames[t - 1].part_transforms.at(uc),
                                                    seq_frame.part_transforms.at(uc));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

struct Source {
  std::string label;
  std::optional<sim::SceneSequence> loaded;  // sequence directories only
  std::string load_error;
};

struct CellOutput {
  std::vector<FrameRow> rows;
  std::string failure;
};

CellOutput run_cell(const RunConfig& cfg, const Source& src, std::uint64_t seed,
                    const std::vector<Strategy>& strategies) {
  CellOutput out;
  try {
    if (!src.load_error.empty()) throw DataError(src.load_error);
    std::optional<sim::SceneSequence> generated;
    if (!src.loaded) {
      const auto spec = make_scene(cfg.scene, seed);
      generated = sim::generate_sequence(spec, cfg.noise, cfg.sampler.inferences, seed);
    }
    const sim::SceneSequence& seq = src.loaded ? *src.loaded : *generated;
    for (Strategy s : strategies) {
      SamplerConfig sc = cfg.sampler;
      sc.strategy = s;
      sc.seed = seed;
      const auto frames = run_trajectory(seq, sc);
      auto rows = evaluate_trajectory(seq, frames, src.label, seed, s, cfg.coverage_radius);
      out.rows.insert(out.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    }
  } catch (const std::exception& e) {
    out.rows.clear();
    out.failure = src.label + " seed " + std::to_string(seed) + ": " + e.what();
  }
  return out;
}

std::string opt_field(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }

}  // namespace

CompareResult run_compare(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<Strategy> strategies = cfg.strategies.empty() ? all_strategies() : cfg.strategies;

  std::vector<Source> sources;
  if (cfg.sequences.empty()) {
    sources.push_back({std::string(sim::kind_name(*cfg.scene.kind)), std::nullopt, {}});
  } else {
    for (const auto& dir : cfg.sequences) {
      Source src{dir, std::nullopt, {}};
      try {
        src.loaded = sim::read_sequence(dir);
      } catch (const std::exception& e) {
        src.load_error = e.what();
      }
      sources.push_back(std::move(src));
    }
  }

  const std::size_t cells = sources.size() * cfg.seeds.size();
  std::vector<CellOutput> outputs(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      const Source& src = sources[i / cfg.seeds.size()];
      outputs[i] = run_cell(cfg, src, cfg.seeds[i % cfg.seeds.size()], strategies);
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), cells);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  CompareResult result;
  for (auto& o : outputs) {
    if (!o.failure.empty()) result.failures.push_back(std::move(o.failure));
    result.rows.insert(result.rows.end(), std::make_move_iterator(o.rows.begin()),
                       std::make_move_iterator(o.rows.end()));
  }
  return result;
}

std::string rows_to_csv(const std::vector<FrameRow>& rows) {
  std::ostringstream out;
  out << "scene,seed,strategy,frame,part,part_name,points,fallback,chamfer,consistency,contamination,coverage\n";
  for (const auto& r : rows) {
    out << r.scene << ',' << r.seed << ',' << strategy_name(r.strategy) << ',' << r.frame << ',' << r.part << ','
        << r.part_name << ',' << r.points << ',' << (r.fallback ? 1 : 0) << ',' << opt_field(r.chamfer) << ','
        << opt_field(r.consistency) << ',' << opt_field(r.contamination) << ',' << opt_field(r.coverage) << '\n';
  }
  return out.str();
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::kChamfer: return "chamfer";
    case Metric::kConsistency: return "consistency";
    case Metric::kContamination: return "contamination";
    case Metric::kCoverage: return "coverage";
  }
  return "?";
}

std::optional<double> metric_value(const FrameRow& row, Metric m) {
  switch (m) {
    case Metric::kChamfer: return row.chamfer;
    case Metric::kConsistency: return row.consistency;
    case Metric::kContamination: return row.contamination;
    case Metric::kCoverage: return row.coverage;
  }
  return std::nullopt;
}

std::map<SeedKey, double> per_seed_means(const std::vector<FrameRow>& rows, Metric m) {
  std::map<SeedKey, std::pair<double, std::size_t>> acc;
  for (const auto& r : rows) {
    const auto v = metric_value(r, m);
    if (!v) continue;
    auto& slot = acc[SeedKey{r.scene, std::string(strategy_name(r.strategy)), r.part_name, r.seed}];
    slot.first += *v;
    ++slot.second;
  }
  std::map<SeedKey, double> out;
  for (const auto& [key, sum] : acc) out[key] = sum.first / static_cast<double>(sum.second);
  return out;
}

Aggregate aggregate(std::vector<double> values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  a.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return a;
}

json summarize(const CompareResult& result, const RunConfig& cfg) {
  using GroupKey = std::tuple<std::string, std::string, std::string>;
  std::map<GroupKey, json> groups;
  for (Metric m : {Metric::kChamfer, Metric::kConsistency, Metric::kContamination, Metric::kCoverage}) {
    std::map<GroupKey, std::vector<double>> values;
    for (const auto& [key, v] : per_seed_means(result.rows, m))
      values[GroupKey{std::get<0>(key), std::get<1>(key), std::get<2>(key)}].push_back(v);
    for (auto& [key, vs] : values) {
      const Aggregate a = aggregate(vs);
      groups[key][metric_name(m)] = {{"mean", a.mean}, {"std", a.stddev}, {"median", a.median}, {"seeds", a.count}};
    }
  }
  json results = json::array();
  for (auto& [key, metrics] : groups) {
    json entry{{"scene", std::get<0>(key)}, {"strategy", std::get<1>(key)}, {"part", std::get<2>(key)}};
    for (auto& [name, value] : metrics.items()) entry[name] = value;
    results.push_back(std::move(entry));
  }
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"config", to_json(cfg)},
          {"failures", result.failures},
          {"results", results}};
}

void write_compare_outputs(const CompareResult& result, const RunConfig& cfg, const fs::path& dir, bool csv,
                           bool json_out) {
  fs::create_directories(dir);
  if (csv) io::write_text(dir / "metrics.csv", rows_to_csv(result.rows));
  if (json_out) io::write_text(dir / "summary.json", summarize(result, cfg).dump(2) + "\n");
}

void write_trajectory(const std::vector<SampledFrame>& frames, const fs::path& dir, const json& manifest) {
  if (fs::exists(dir) && !(fs::is_directory(dir) && fs::is_empty(dir)))
    throw DataError(dir.string() + " already exists and is not an empty directory");
  const fs::path tmp = dir.string() + ".partial";
  fs::remove_all(tmp);
  try {
    fs::create_directories(tmp);
    for (const auto& f : frames) {
      io::PlyTable table;
      std::vector<double> part, weight, pixel, fallback;
      for (std::size_t c = 0; c < f.parts.size(); ++c) {
        const auto& ps = f.parts[c];
        for (std::size_t i = 0; i < ps.size(); ++i) {
          table.points.push_back(ps.points[i]);
          part.push_back(static_cast<double>(c));
          weight.push_back(ps.weights[i]);
          pixel.push_back(ps.pixel[i]);
          fallback.push_back(ps.fallback ? 1.0 : 0.0);
        }
      }
      table.add_property("part", std::move(part), true);
      table.add_property("weight", std::move(weight));
      table.add_property("pixel", std::move(pixel), true);
      table.add_property("fallback", std::move(fallback), true);
      io::write_ply(tmp / ("frame_" + sim::frame_stem(f.frame) + ".ply"), table);
    }
    json m = manifest;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["frames"] = frames.size();
    if (!frames.empty()) m["strategy"] = std::string(strategy_name(frames.front().strategy));
    io::write_text(tmp / "manifest.json", m.dump(2) + "\n");
    if (fs::exists(dir)) fs::remove(dir);
    fs::rename(tmp, dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
}

std::vector<SampledFrame> read_trajectory(const fs::path& dir, Strategy* strategy) {
  const json manifest = sim::read_json(dir / "manifest.json");
  int frames = 0;
  Strategy s = Strategy::kFus;
  int classes = 0;
  try {
    frames = manifest.at("frames").get<int>();
    s = parse_strategy(manifest.at("strategy").get<std::string>());
    classes = manifest.at("classes").get<int>();
  } catch (const std::exception& e) {
    throw DataError(dir.string() + "/manifest.json: " + e.what());
  }
  if (strategy) *strategy = s;
  std::vector<SampledFrame> out;
  for (int t = 0; t < frames; ++t) {
    try {
      const auto table = io::read_ply(dir / ("frame_" + sim::frame_stem(t) + ".ply"));
      const auto& part = table.property("part");
      const auto& weight = table.property("weight");
      const auto& pixel = table.property("pixel");
      const auto& fallback = table.property("fallback");
      SampledFrame f;
      f.frame = t;
      f.strategy = s;
      f.parts.resize(static_cast<std::size_t>(std::max(classes, 1)));
      for (std::size_t i = 0; i < table.points.size(); ++i) {
        if (part[i] < 0 || part[i] >= 256) throw DataError("part id out of range");
        const auto c = static_cast<std::size_t>(part[i]);
        if (c >= f.parts.size()) f.parts.resize(c + 1);
        auto& ps = f.parts[c];
        ps.points.push_back(table.points[i]);
        ps.weights.push_back(weight[i]);
        ps.pixel.push_back(static_cast<std::int32_t>(pixel[i]));
        ps.fallback = fallback[i] != 0.0;
      }
      out.push_back(std::move(f));
    } catch (const std::exception& e) {
      throw DataError("frame " + std::to_string(t) + " of " + dir.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace fus::bench
