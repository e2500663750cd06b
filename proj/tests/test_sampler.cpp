#include <doctest.h>

#include <set>

#include "fus/metrics.hpp"
#include "fus/sampler.hpp"
#include "oracles.hpp"

using namespace fus;

namespace {

/// Synthetic candidates: part c lies on a plane patch offset by c.
PartPointCloud synthetic_cloud(Rng& rng, std::vector<std::size_t> sizes) {
  PartPointCloud cloud;
  cloud.parts.resize(sizes.size());
  std::int32_t px = 0;
  for (std::size_t c = 1; c < sizes.size(); ++c)
    for (std::size_t i = 0; i < sizes[c]; ++i)
      cloud.parts[c].push(Vec3(rng.uniform(0, 0.2), rng.uniform(0, 0.2), 0.1 * static_cast<double>(c)),
                          rng.uniform(), rng.uniform(0.5, 1.0), px++);
  return cloud;
}

SceneCloud synthetic_scene(Rng& rng, std::size_t above, std::size_t table) {
  SceneCloud s;
  std::int32_t px = 0;
  for (std::size_t i = 0; i < above; ++i) {
    s.points.emplace_back(rng.uniform(), rng.uniform(), rng.uniform(0.1, 1.0));
    s.labels.push_back(PartId{1 + static_cast<int>(i % 3)});
    s.pixel.push_back(px++);
  }
  for (std::size_t i = 0; i < table; ++i) {
    s.points.emplace_back(rng.uniform(), rng.uniform(), rng.uniform(-0.001, 0.004));
    s.labels.push_back(kBackground);
    s.pixel.push_back(px++);
  }
  return s;
}

}  // namespace

TEST_CASE("strategy names round trip") {
  for (Strategy s : all_strategies()) CHECK(parse_strategy(strategy_name(s)) == s);
  CHECK(all_strategies().size() == 7);
  CHECK_THROWS_AS(parse_strategy("Bogus"), InputError);
}

TEST_CASE("config defaults and validation") {
  SamplerConfig cfg;
  CHECK(cfg.points_per_part == 32);
  CHECK(cfg.inferences == 4);
  CHECK(cfg.queue_length == 3);
  CHECK(cfg.decay == 40.0);
  CHECK(cfg.downsample_total == 1024);
  cfg.points_per_part = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("combine weights") {
  const std::vector<double> ua{0.25, 0.75}, fc{1.0, 0.5};
  CHECK(combine_weights(ua, fc) == std::vector<double>{0.25, 0.375});
  CHECK(combine_weights(ua, std::vector<double>{1.0, 1.0}) == ua);
  CHECK(combine_weights(ua, std::vector<double>{0.0, 1.0})[0] == 0.0);
  CHECK_THROWS_AS(combine_weights(ua, std::vector<double>{1.0}), InputError);
}

TEST_CASE("weighted sample edge cases") {
  Rng rng(1);
  const std::vector<double> w{3.0, 1.0, 2.0, 0.5};
  auto all = weighted_sample(w, 4, rng);
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<std::size_t>{0, 1, 2, 3});

  for (int i = 0; i < 50; ++i) CHECK(weighted_sample(std::vector<double>{1, 0, 0, 0}, 1, rng)[0] == 0);

  // Zero weights only after every positive one.
  for (int i = 0; i < 50; ++i) {
    auto picks = weighted_sample(std::vector<double>{0, 2, 0, 1, 0}, 3, rng);
    CHECK(picks.size() == 3);
    CHECK(std::set<std::size_t>(picks.begin(), picks.end()).size() == 3);
    CHECK(std::count(picks.begin(), picks.end(), 1) == 1);
    CHECK(std::count(picks.begin(), picks.end(), 3) == 1);
  }

  // Short lists: every candidate once, in order, then repeats.
  auto short_picks = weighted_sample(std::vector<double>{1, 1}, 5, rng);
  REQUIRE(short_picks.size() == 5);
  CHECK(short_picks[0] == 0);
  CHECK(short_picks[1] == 1);

  CHECK_THROWS_AS(weighted_sample(std::vector<double>{1, -1}, 1, rng), InputError);
  CHECK_THROWS_AS(weighted_sample(std::vector<double>{0, 0, 0}, 2, rng), InputError);
  CHECK(weighted_sample(std::vector<double>{}, 3, rng).empty());
}

TEST_CASE("weighted sample inclusion matches enumeration") {
  const std::vector<double> w{2.0, 1.0, 1.0};
  const auto expect = oracle::inclusion(w, 2);
  CHECK(expect[0] == doctest::Approx(5.0 / 6.0));
  const int trials = 20000;
  std::vector<int> hits(3, 0);
  for (int s = 0; s < trials; ++s) {
    Rng rng = Rng::stream(77, static_cast<std::uint64_t>(s));
    for (std::size_t i : weighted_sample(w, 2, rng)) ++hits[i];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double p = expect[i];
    const double sigma = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(hits[i] / double(trials) - p) <= 3 * sigma + 1e-12);
  }
}

TEST_CASE("weighted sample is deterministic given the stream") {
  std::vector<double> w(100);
  Rng g(5);
  for (auto& x : w) x = g.uniform();
  Rng a = Rng::stream(9, 1, 2), b = Rng::stream(9, 1, 2);
  CHECK(weighted_sample(w, 32, a) == weighted_sample(w, 32, b));
}

TEST_CASE("farthest point sampling") {
  const std::vector<Vec3> line{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(10, 0, 0)};
  CHECK(fps_sample(line, 2) == std::vector<std::size_t>{3, 0});
  CHECK(fps_sample(line, 3) == std::vector<std::size_t>{3, 0, 2});
  auto all = fps_sample(line, 4);
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(fps_sample(line, 6) == std::vector<std::size_t>{3, 0, 2, 1, 1, 1});
  CHECK_THROWS_AS(fps_sample(std::vector<Vec3>{}, 2), InputError);
  // Ties go to the lowest index.
  const std::vector<Vec3> square{Vec3(1, 1, 0), Vec3(-1, 1, 0), Vec3(-1, -1, 0), Vec3(1, -1, 0)};
  CHECK(fps_sample(square, 2) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("score sampling") {
  CHECK(score_sample(std::vector<double>{0.9, 0.5, 0.99}, 2) == std::vector<std::size_t>{2, 0});
  CHECK(score_sample(std::vector<double>{0.5, 0.5, 0.5, 0.5}, 3) == std::vector<std::size_t>{0, 1, 2});
  CHECK(score_sample(std::vector<double>{0.2, 0.7}, 4) == std::vector<std::size_t>{1, 0, 0, 0});
}

TEST_CASE("uniform downsample drops the table and keeps the budget") {
  Rng g(3);
  const auto scene = synthetic_scene(g, 3000, 2000);
  Rng rng(4);
  const auto picks = uniform_downsample(scene, 0.0, 0.005, 1024, rng);
  CHECK(picks.size() == 1024);
  CHECK(std::set<std::size_t>(picks.begin(), picks.end()).size() == 1024);
  for (std::size_t i : picks) CHECK(scene.points[i].z() > 0.005);
  const auto few = synthetic_scene(g, 10, 50);
  Rng rng2(4);
  CHECK(uniform_downsample(few, 0.0, 0.005, 1024, rng2).size() == 10);
}

TEST_CASE("first frame: FUS and FUS-no-uncertainty equal Random") {
  Rng g(8);
  const auto cloud = synthetic_cloud(g, {0, 300, 80, 20});
  FrameInput in;
  in.frame = 0;
  in.cloud = &cloud;
  SamplerConfig cfg;
  cfg.seed = 42;
  std::vector<SampledFrame> out;
  for (Strategy s : {Strategy::kRandom, Strategy::kFus, Strategy::kFusNoUncertainty}) {
    cfg.strategy = s;
    SampleQueue q(3);
    out.push_back(sample_frame(in, q, cfg));
    CHECK(q.entries(PartId{1}).size() == 1);
  }
  for (std::size_t c = 1; c < 4; ++c) {
    CHECK(out[1].parts[c].pixel == out[0].parts[c].pixel);
    CHECK(out[2].parts[c].pixel == out[0].parts[c].pixel);
  }
  CHECK(out[0].total_points() == 96);
  CHECK(out[0].parts_present() == 3);
}

TEST_CASE("every strategy fills each present part with N_s points") {
  Rng g(9);
  const auto cloud = synthetic_cloud(g, {0, 300, 0, 20});
  const auto scene = synthetic_scene(g, 2000, 100);
  for (Strategy s : all_strategies()) {
    SamplerConfig cfg;
    cfg.strategy = s;
    SampleQueue q(3);
    FrameInput in{0, &cloud, &scene, 0.0};
    const auto f = sample_frame(in, q, cfg);
    if (s == Strategy::kUniformDownsample) {
      CHECK(f.total_points() == 1024);
      continue;
    }
    CHECK(f.parts[1].size() == 32);
    CHECK(f.parts[2].size() == 0);
    CHECK(f.parts[3].size() == 32);
    CHECK(f.total_points() == 64);
  }
}

TEST_CASE("missing part falls back to its latest queue entry") {
  Rng g(10);
  const auto full = synthetic_cloud(g, {0, 100, 100});
  auto partial = full;
  partial.parts[2] = PartPoints{};
  SamplerConfig cfg;
  SampleQueue q(3);
  const auto f0 = sample_frame(FrameInput{0, &full, nullptr, 0.0}, q, cfg);
  const auto f1 = sample_frame(FrameInput{1, &partial, nullptr, 0.0}, q, cfg);
  CHECK(f1.parts[2].fallback);
  CHECK(f1.parts[2].points == f0.parts[2].points);
  CHECK(f1.parts[2].pixel == std::vector<std::int32_t>(32, -1));
  CHECK(q.entries(PartId{2}).size() == 1);  // fallback sets are not re-queued
  CHECK(q.entries(PartId{1}).size() == 2);

  SampleQueue empty(3);
  const auto none = sample_frame(FrameInput{0, &partial, nullptr, 0.0}, empty, cfg);
  CHECK(none.parts[2].size() == 0);
  CHECK_FALSE(none.parts[2].fallback);
}

TEST_CASE("ablations substitute ones for the omitted factor") {
  Rng g(11);
  const auto cloud = synthetic_cloud(g, {0, 50});
  const PartPoints& cand = cloud.part(PartId{1});
  SampleQueue q(3);
  q.push(PartId{1}, 0, {Vec3(0.1, 0.1, 0.1)});
  SamplerConfig cfg;
  cfg.strategy = Strategy::kFus;
  const auto w = fus_part_weights(cand, q, PartId{1}, cfg, false);
  cfg.strategy = Strategy::kFusNoUncertainty;
  const auto w_nu = fus_part_weights(cand, q, PartId{1}, cfg, false);
  cfg.strategy = Strategy::kFusNoConsistency;
  const auto w_nc = fus_part_weights(cand, q, PartId{1}, cfg, false);
  const auto ua = uncertainty_weights(cand.uncertainty);
  const auto fc = consistency_weights(distance_to_queue(cand.points, q, PartId{1}), 40.0);
  CHECK(w == combine_weights(ua, fc));
  CHECK(w_nu == fc);
  CHECK(w_nc == ua);
}

TEST_CASE("static scene: consecutive FUS samples stay closer than Random") {
  Rng g(12);
  const auto cloud = synthetic_cloud(g, {0, 400});
  const int frames = 8;
  auto gaps = [&](Strategy strategy) {
    std::vector<double> mean_gap(frames - 1, 0.0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      SamplerConfig cfg;
      cfg.seed = seed;
      cfg.strategy = strategy;
      SampleQueue q(3);
      std::vector<std::vector<Vec3>> pts;
      for (long t = 0; t < frames; ++t)
        pts.push_back(sample_frame(FrameInput{t, &cloud, nullptr, 0.0}, q, cfg).parts[1].points);
      for (std::size_t t = 0; t + 1 < pts.size(); ++t) mean_gap[t] += *metrics::mean_nn_distance(pts[t], pts[t + 1]) / 100.0;
    }
    return mean_gap;
  };
  const auto fus = gaps(Strategy::kFus);
  const auto rnd = gaps(Strategy::kRandom);
  for (std::size_t t = 0; t < fus.size(); ++t) CHECK(fus[t] < rnd[t]);
}

TEST_CASE("every strategy is deterministic given inputs and seed") {
  Rng g(13);
  const auto cloud = synthetic_cloud(g, {0, 200, 60, 15});
  const auto scene = synthetic_scene(g, 3000, 500);
  for (Strategy s : all_strategies()) {
    SamplerConfig cfg;
    cfg.strategy = s;
    cfg.seed = 99;
    SampleQueue qa(3), qb(3);
    for (long t = 0; t < 4; ++t) {
      const FrameInput in{t, &cloud, &scene, 0.0};
      const auto a = sample_frame(in, qa, cfg);
      const auto b = sample_frame(in, qb, cfg);
      REQUIRE(a.parts.size() == b.parts.size());
      for (std::size_t c = 0; c < a.parts.size(); ++c) {
        CHECK(a.parts[c].points == b.parts[c].points);
        CHECK(a.parts[c].weights == b.parts[c].weights);
        CHECK(a.parts[c].pixel == b.parts[c].pixel);
      }
    }
  }
}

TEST_CASE("scaling all weights leaves the draw unchanged") {
  Rng g(14);
  std::vector<double> w(40);
  for (auto& x : w) x = g.uniform_pos();
  std::vector<double> scaled = w;
  for (auto& x : scaled) x *= 8.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng a = Rng::stream(14, s), b = Rng::stream(14, s);
    CHECK(weighted_sample(w, 10, a) == weighted_sample(scaled, 10, b));
  }
  // A factor that is not a power of two still gives the same distribution.
  const std::vector<double> small{0.5, 1.5, 1.0, 3.0};
  std::vector<double> odd = small;
  for (auto& x : odd) x *= 3.7;
  const auto expect = oracle::inclusion(small, 2);
  const int trials = 20000;
  std::vector<int> hits(small.size(), 0);
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(15, static_cast<std::uint64_t>(t));
    for (std::size_t i : weighted_sample(odd, 2, rng)) ++hits[i];
  }
  for (std::size_t i = 0; i < small.size(); ++i) {
    const double sigma = std::sqrt(expect[i] * (1 - expect[i]) / trials);
    CHECK(std::abs(hits[i] / double(trials) - expect[i]) <= 3 * sigma);
  }
}

TEST_CASE("ablations reduce to FUS when the omitted factor is uniform") {
  Rng g(16);
  auto cloud = synthetic_cloud(g, {0, 120});
  SampleQueue q(3);
  q.push(PartId{1}, 0, {Vec3(0.05, 0.05, 0.1), Vec3(0.15, 0.1, 0.1)});
  SamplerConfig cfg;
  cfg.strategy = Strategy::kFus;
  const SampleQueue empty(3);
  const auto& cand = cloud.part(PartId{1});
  const auto fus_empty = fus_part_weights(cand, empty, PartId{1}, cfg, false);
  cfg.strategy = Strategy::kFusNoConsistency;
  CHECK(fus_part_weights(cand, empty, PartId{1}, cfg, false) == fus_empty);

  // Constant uncertainty: FUS weights are a constant multiple of the
  // consistency-only weights, so the draws coincide.
  for (auto& u : cloud.parts[1].uncertainty) u = 0.4;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<std::vector<std::int32_t>> picks;
    for (Strategy s : {Strategy::kFus, Strategy::kFusNoUncertainty}) {
      cfg.strategy = s;
      cfg.seed = seed;
      SampleQueue qq = q;
      picks.push_back(sample_frame(FrameInput{1, &cloud, nullptr, 0.0}, qq, cfg).parts[1].pixel);
    }
    CHECK(picks[0] == picks[1]);
  }
}

TEST_CASE("FPS covers uniform clouds at least as tightly as Random") {
  auto radius = [](const std::vector<Vec3>& cloud, const std::vector<std::size_t>& picks) {
    double worst = 0.0;
    for (const auto& p : cloud) {
      double best = INFINITY;
      for (std::size_t i : picks) best = std::min(best, (p - cloud[i]).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  double fps = 0.0, rnd = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng g(seed);
    std::vector<Vec3> cloud;
    for (int i = 0; i < 1000; ++i) cloud.emplace_back(g.uniform(), g.uniform(), g.uniform());
    fps += radius(cloud, fps_sample(cloud, 32)) / 100.0;
    const std::vector<double> ones(cloud.size(), 1.0);
    Rng r = Rng::stream(seed, 1);
    rnd += radius(cloud, weighted_sample(ones, 32, r)) / 100.0;
  }
  CHECK(fps <= rnd);
}

TEST_CASE("uniform downsample includes each off-table point with equal probability") {
  Rng g(17);
  const auto scene = synthetic_scene(g, 16, 16);
  const int trials = 100000, total = 8;
  std::vector<int> hits(scene.points.size(), 0);
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(17, static_cast<std::uint64_t>(t));
    for (std::size_t i : uniform_downsample(scene, 0.0, 0.005, total, rng)) ++hits[i];
  }
  const double p = total / 16.0;
  const double sigma = std::sqrt(p * (1 - p) / trials);
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    if (i < 16) {
      CHECK(std::abs(hits[i] / double(trials) - p) <= 3 * sigma);
    } else {
      CHECK(hits[i] == 0);
    }
  }
}

TEST_CASE("feature encoding appends a one-hot part code") {
  SampledFrame f;
  f.parts.resize(3);
  f.parts[0].points = {Vec3(9, 9, 9)};
  f.parts[1].points = {Vec3(1, 2, 3)};
  f.parts[2].points = {Vec3(4, 5, 6)};
  const auto feat = encode_features(f, 3);
  CHECK(feat == std::vector<double>{1, 2, 3, 1, 0, 4, 5, 6, 0, 1});
}
