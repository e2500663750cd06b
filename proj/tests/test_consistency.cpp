#include <doctest.h>

#include "fus/consistency.hpp"
#include "fus/rng.hpp"
#include "oracles.hpp"

using namespace fus;

namespace {

std::vector<Vec3> random_points(Rng& rng, std::size_t n) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(rng.uniform(), rng.uniform(), rng.uniform());
  return pts;
}

}  // namespace

TEST_CASE("decay weights") {
  const std::vector<double> d{0.0, 0.05, 0.025};
  const auto w = consistency_weights(d, 40.0);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == 0.25);
  CHECK(w[2] == 0.5);
  CHECK_THROWS_AS(consistency_weights(std::vector<double>{-1.0}, 40.0), InputError);
  CHECK_THROWS_AS(consistency_weights(std::vector<double>{1.0}, 0.0), InputError);
  CHECK_THROWS_AS(consistency_weights(std::vector<double>{INFINITY}, 40.0), InputError);
  // Far points keep a tiny positive weight.
  CHECK(consistency_weights(std::vector<double>{1e3}, 40.0)[0] > 0.0);
}

TEST_CASE("decay weights match the oracle and are monotone") {
  Rng rng(21);
  std::vector<double> d(500);
  for (auto& x : d) x = rng.uniform(0.0, 0.3);
  const auto w = consistency_weights(d, 40.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(std::abs(w[i] - oracle::decay(d[i], 40.0)) <= 1e-12);
    for (std::size_t j = 0; j < 20; ++j) {
      if (d[i] < d[j]) CHECK(w[i] > w[j]);
    }
  }
}

TEST_CASE("queue is a bounded FIFO per part") {
  SampleQueue q(3);
  const PartId p{2};
  CHECK(q.empty());
  q.push(p, 0, {Vec3(0, 0, 0)});
  CHECK(q.entries(p).size() == 1);
  CHECK(q.empty(PartId{1}));
  q.push(p, 1, {Vec3(1, 0, 0)});
  q.push(p, 2, {Vec3(2, 0, 0)});
  q.push(p, 3, {Vec3(3, 0, 0)});
  REQUIRE(q.entries(p).size() == 3);
  CHECK(q.entries(p).front().frame == 1);
  CHECK(q.latest(p)->frame == 3);
  long last = -1;
  for (const auto& e : q.entries(p)) {
    CHECK(e.frame > last);
    last = e.frame;
  }
  CHECK(q.stored_points(p).size() == 3);
  CHECK_THROWS_AS(q.push(p, 3, {}), InputError);
  CHECK(q.latest(PartId{7}) == nullptr);
}

TEST_CASE("distance to queue uses the union of stored sets") {
  SampleQueue q(3);
  const PartId p{1};
  const std::vector<Vec3> cand{Vec3(0, 0, 0), Vec3(5, 0, 0)};
  CHECK(distance_to_queue(cand, q, p) == std::vector<double>{0.0, 0.0});
  q.push(p, 0, {Vec3(1, 0, 0)});
  q.push(p, 1, {Vec3(5, 0, 2)});
  const auto d = distance_to_queue(cand, q, p);
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 2.0);
}

TEST_CASE("distance to queue equals brute force exactly") {
  Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    SampleQueue q(3);
    const PartId p{1};
    std::vector<Vec3> all;
    for (long f = 0; f < 4; ++f) {
      auto pts = random_points(rng, 1 + rng.below(60));
      q.push(p, f, pts);
    }
    all = q.stored_points(p);
    const auto cand = random_points(rng, 1 + rng.below(300));
    const auto d = distance_to_queue(cand, q, p);
    for (std::size_t i = 0; i < cand.size(); ++i) {
      double best = INFINITY;
      for (const auto& r : all) best = std::min(best, (cand[i] - r).squaredNorm());
      CHECK(d[i] == std::sqrt(best));
    }
  }
}

TEST_CASE("erroneous set stops influencing weights once evicted") {
  Rng rng(23);
  const PartId p{1};
  const auto cand = random_points(rng, 200);
  std::vector<std::vector<Vec3>> clean;
  for (int f = 0; f < 8; ++f) clean.push_back(random_points(rng, 32));
  std::vector<Vec3> wrong;
  for (int i = 0; i < 32; ++i) wrong.emplace_back(rng.uniform(3, 4), rng.uniform(3, 4), rng.uniform(3, 4));

  SampleQueue a(3), b(3);
  for (long f = 0; f < 8; ++f) {
    a.push(p, f, clean[static_cast<std::size_t>(f)]);
    b.push(p, f, f == 2 ? wrong : clean[static_cast<std::size_t>(f)]);
    const auto wa = consistency_weights(distance_to_queue(cand, a, p), 40.0);
    const auto wb = consistency_weights(distance_to_queue(cand, b, p), 40.0);
    if (f >= 2 + 3) {
      CHECK(wa == wb);
    } else if (f >= 2) {
      CHECK(wa != wb);
    }
  }
}

TEST_CASE("push_samples skips empty sets") {
  SampleQueue q(3);
  PartSampleSets s;
  s.parts = {{}, {Vec3(0, 0, 0)}, {}};
  push_samples(q, s, 4);
  CHECK(q.entries(PartId{1}).size() == 1);
  CHECK(q.empty(PartId{2}));
}
