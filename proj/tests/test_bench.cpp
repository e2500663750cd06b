#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fus/bench.hpp"
#include "fus/io.hpp"
#include "fus/sequence_io.hpp"

using namespace fus;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fus_bench_" + name);
  fs::remove_all(p);
  fs::remove_all(p.string() + ".partial");
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run(const std::string& args) {
  const std::string cmd = std::string(FUS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run config defaults round trip") {
  bench::RunConfig cfg;
  CHECK(cfg.sampler.inferences == 4);
  CHECK(cfg.sampler.queue_length == 3);
  CHECK(cfg.sampler.decay == 40.0);
  CHECK(cfg.sampler.points_per_part == 32);
  CHECK(sim::Intrinsics{}.height == 144);
  CHECK(sim::Intrinsics{}.width == 256);
  const auto back = bench::parse_run_config(bench::to_json(cfg));
  CHECK(bench::to_json(back) == bench::to_json(cfg));
  CHECK(bench::parse_run_config(json::object()).sampler.decay == 40.0);
}

TEST_CASE("run config parsing is strict") {
  CHECK_THROWS_AS(bench::parse_run_config(json{{"sampler", {{"decay", 1.0}, {"Ns", 3}}}}), InputError);
  CHECK_THROWS_AS(bench::parse_run_config(json{{"seed", 3}}), InputError);
  CHECK_THROWS_AS(bench::parse_run_config(json{{"strategies", json::array()}}), InputError);
  CHECK_THROWS_AS(bench::parse_run_config(json{{"strategies", {"FUS", "Nope"}}}), InputError);
  CHECK_THROWS_AS(bench::parse_run_config(json{{"sampler", {{"decay", "forty"}}}}), InputError);
  const auto cfg = bench::parse_run_config(json{{"seeds", {{"start", 5}, {"count", 3}}}});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{5, 6, 7});
  try {
    bench::parse_run_config(json{{"scene", {{"frames", 5}}}}).validate();
    FAIL("expected a missing-field error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("scene.kind") != std::string::npos);
  }
}

TEST_CASE("compare output does not depend on worker count") {
  bench::RunConfig cfg;
  cfg.scene.kind = sim::ObjectKind::kFaucet;
  cfg.scene.frames = 4;
  cfg.seeds = {0, 1, 2};
  cfg.strategies = {Strategy::kFus, Strategy::kRandom};
  cfg.workers = 1;
  const auto a = bench::run_compare(cfg);
  cfg.workers = 3;
  const auto b = bench::run_compare(cfg);
  CHECK(a.failures.empty());
  CHECK(a.rows.size() == 3 * 2 * 4 * 2);
  CHECK(bench::rows_to_csv(a.rows) == bench::rows_to_csv(b.rows));
  const auto summary = bench::summarize(a, cfg);
  CHECK(summary.at("results").size() == 2 * 2);
  CHECK(summary.at("results")[0].at("contamination").at("seeds") == 3);
}

TEST_CASE("failed cells are reported and the rest still runs") {
  bench::RunConfig cfg;
  cfg.sequences = {"/nonexistent/sequence"};
  cfg.strategies = {Strategy::kFus};
  const auto r = bench::run_compare(cfg);
  CHECK(r.failures.size() == 1);
  CHECK(r.rows.empty());
}

TEST_CASE("aggregate statistics") {
  const auto a = bench::aggregate({1.0, 2.0, 4.0, 3.0});
  CHECK(a.mean == 2.5);
  CHECK(a.median == 2.5);
  CHECK(a.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(bench::aggregate({7.0}).stddev == 0.0);
}

TEST_CASE("trajectory directory round trip") {
  const auto seq = sim::generate_sequence(sim::build_scene(sim::ObjectKind::kDoor, 3, 3), sim::NoiseSpec{}, 4, 3);
  SamplerConfig cfg;
  const auto frames = bench::run_trajectory(seq, cfg);
  const auto dir = fresh("traj");
  bench::write_trajectory(frames, dir, json{{"classes", seq.classes()}});
  Strategy s{};
  const auto back = bench::read_trajectory(dir, &s);
  CHECK(s == Strategy::kFus);
  REQUIRE(back.size() == frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t)
    for (std::size_t c = 1; c < frames[t].parts.size(); ++c) {
      CHECK(back[t].parts[c].points == frames[t].parts[c].points);
      CHECK(back[t].parts[c].weights == frames[t].parts[c].weights);
      CHECK(back[t].parts[c].pixel == frames[t].parts[c].pixel);
    }
}

TEST_CASE("cli end to end") {
  const auto root = fresh("cli");
  fs::create_directories(root);
  const std::string r = root.string();

  CHECK(run("generate --kind drawer --frames 4 --seed 2 --out " + r + "/seq_a") == 0);
  CHECK(run("generate --kind drawer --frames 4 --seed 2 --out " + r + "/seq_b") == 0);
  CHECK(slurp(root / "seq_a" / "manifest.json") == slurp(root / "seq_b" / "manifest.json"));
  CHECK(slurp(root / "seq_a" / "prob" / "0003.bin") == slurp(root / "seq_b" / "prob" / "0003.bin"));
  const auto manifest = sim::read_json(root / "seq_a" / "manifest.json");
  CHECK(manifest.at("parts") == json({"background", "base", "facade", "handle"}));
  CHECK(manifest.at("config").at("scene").at("kind") == "drawer");

  CHECK(run("sample --sequence " + r + "/seq_a --out " + r + "/fus_a") == 0);
  CHECK(run("sample --sequence " + r + "/seq_a --out " + r + "/fus_b") == 0);
  CHECK(slurp(root / "fus_a" / "frame_0002.ply") == slurp(root / "fus_b" / "frame_0002.ply"));
  const auto ply = io::read_ply(root / "fus_a" / "frame_0002.ply");
  CHECK(ply.points.size() == 96);
  CHECK(run("sample --sequence " + r + "/seq_a --strategy UniformDownsample --out " + r + "/ud") == 0);
  CHECK(io::read_ply(root / "ud" / "frame_0001.ply").points.size() == 1024);

  CHECK(run("evaluate --sequence " + r + "/seq_a --trajectory " + r + "/fus_a --format json --out " + r + "/eval") == 0);
  CHECK(fs::exists(root / "eval" / "summary.json"));

  CHECK(run("compare --kind faucet --frames 3 --seed 0 --seeds 2 --strategies FUS,Random --out " + r + "/cmp1") == 0);
  CHECK(run("compare --kind faucet --frames 3 --seed 0 --seeds 2 --strategies FUS,Random --workers 2 --out " + r + "/cmp2") == 0);
  CHECK(slurp(root / "cmp1" / "metrics.csv") == slurp(root / "cmp2" / "metrics.csv"));
  CHECK(run("compare --kind faucet --frames 3 --ablation --out " + r + "/abl") == 0);
  const auto summary = sim::read_json(root / "abl" / "summary.json");
  CHECK(summary.at("results").size() == 3 * 2);

  // Usage errors.
  CHECK(run("generate --frames 4 --out " + r + "/nokind") == 1);
  CHECK(run("compare --kind door --strategies , --out " + r + "/empty") == 1);
  CHECK(run("bogus") == 1);
  std::ofstream(root / "bad.json") << R"({"scene": {"kind": "door"}, "samplr": {}})";
  CHECK(run("generate --config " + r + "/bad.json --out " + r + "/bad") == 1);
  // Data errors.
  CHECK(run("sample --sequence " + r + "/missing --out " + r + "/x") == 2);
  io::write_text(root / "seq_b" / "depth" / "0002.bin", "junk");
  CHECK(run("sample --sequence " + r + "/seq_b --out " + r + "/y") == 2);
  CHECK_FALSE(fs::exists(root / "y"));
  CHECK(run("compare --sequence " + r + "/seq_b --strategies FUS --out " + r + "/z") == 2);
}
