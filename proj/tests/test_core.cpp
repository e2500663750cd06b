#include <doctest.h>

#include <filesystem>

#include "fus/core.hpp"
#include "fus/io.hpp"
#include "fus/rng.hpp"

using namespace fus;
namespace fs = std::filesystem;

namespace {

CameraModel test_camera() {
  CameraModel cam;
  cam.fx = 200.0;
  cam.fy = 210.0;
  cam.cx = 3.5;
  cam.cy = 2.5;
  cam.camera_to_world = Rigid::Identity();
  cam.camera_to_world.linear() = Eigen::AngleAxisd(0.3, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  cam.camera_to_world.translation() = Vec3(0.1, -0.5, 0.7);
  return cam;
}

fs::path temp_dir(const char* name) {
  const fs::path p = fs::temp_directory_path() / ("fus_test_" + std::string(name));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("backproject and project are inverse") {
  const auto cam = test_camera();
  for (double u : {0.0, 3.0, 7.0})
    for (double v : {0.0, 5.0})
      for (double d : {0.2, 1.7}) {
        const Vec3 world = cam.camera_to_world * backproject(cam, u, v, d);
        const Vec3 uvd = project(cam, world);
        CHECK(uvd.x() == doctest::Approx(u).epsilon(1e-12));
        CHECK(uvd.y() == doctest::Approx(v).epsilon(1e-12));
        CHECK(uvd.z() == doctest::Approx(d).epsilon(1e-12));
      }
}

TEST_CASE("camera validation rejects improper rotations") {
  auto cam = test_camera();
  CHECK_NOTHROW(cam.validate());
  cam.camera_to_world.linear().col(0) *= -1.0;
  CHECK_THROWS_AS(cam.validate(), InputError);
  cam = test_camera();
  cam.fx = 0.0;
  CHECK_THROWS_AS(cam.validate(), InputError);
}

TEST_CASE("depth validity") {
  DepthMap d(4, 1, 0.0);
  d.values = {0.0, -1.0, 1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_FALSE(d.valid(0));
  CHECK_FALSE(d.valid(1));
  CHECK(d.valid(2));
  CHECK_FALSE(d.valid(3));
  d.max_range = 1.0;
  CHECK_FALSE(d.valid(2));
}

TEST_CASE("lift groups valid pixels by label") {
  const auto cam = test_camera();
  DepthMap depth(3, 2, 1.0);
  depth.values[4] = 0.0;  // invalid
  SegmentationMap seg(3, 2, 0);
  seg.values = {0, 1, 2, 1, 2, 1};
  const auto cloud = lift_to_world(depth, seg, cam, 3);
  REQUIRE(cloud.classes() == 3);
  CHECK(cloud.part(PartId{0}).empty());
  CHECK(cloud.part(PartId{1}).pixel == std::vector<std::int32_t>{1, 3, 5});
  CHECK(cloud.part(PartId{2}).pixel == std::vector<std::int32_t>{2});
  const Vec3 expect = cam.camera_to_world * backproject(cam, 0, 1, 1.0);
  CHECK((cloud.part(PartId{1}).points[1] - expect).norm() == 0.0);

  const auto scene = lift_scene(depth, seg, cam);
  CHECK(scene.points.size() == 5);
  CHECK(scene.labels[0] == kBackground);
}

TEST_CASE("label beyond class count is rejected") {
  DepthMap depth(1, 1, 1.0);
  SegmentationMap seg(1, 1, 5);
  CHECK_THROWS_AS(lift_to_world(depth, seg, test_camera(), 3), InputError);
}

TEST_CASE("mean probability and argmax ties") {
  ProbabilityStack s(2, 3, 2, 1);
  // pixel 0: (0.5,0.5,0) and (0.5,0.5,0) -> tie between 0 and 1 -> 0
  // pixel 1: (0.1,0.2,0.7) and (0.3,0.2,0.5) -> mean (0.2,0.2,0.6) -> 2
  const float v[2][3][2] = {{{0.5f, 0.1f}, {0.5f, 0.2f}, {0.0f, 0.7f}}, {{0.5f, 0.3f}, {0.5f, 0.2f}, {0.0f, 0.5f}}};
  for (int k = 0; k < 2; ++k)
    for (int c = 0; c < 3; ++c)
      for (int p = 0; p < 2; ++p) s.plane(k, c)[p] = v[k][c][p];
  const auto mean = mean_probability(s);
  CHECK(mean.plane(2)[1] == doctest::Approx(0.6));
  const auto seg = argmax_segmentation(mean);
  CHECK(seg.values[0] == 0);
  CHECK(seg.values[1] == 2);
  CHECK(argmax_segmentation(s).values == seg.values);
}

TEST_CASE("stack validation") {
  ProbabilityStack s(1, 2, 1, 1);
  CHECK_THROWS_AS(s.validate(), InputError);  // all zero
  s.data = {0.4f, 0.4f};
  CHECK_THROWS_AS(s.validate(), InputError);  // sum 0.8
  s.data = {-0.1f, 1.1f};
  CHECK_THROWS_AS(s.validate(), InputError);
  s.data = {0.25f, 0.75f};
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("binary raster and stack round trip") {
  const auto dir = temp_dir("raster");
  DepthMap d(3, 2, 0.0);
  d.values = {0.0, 0.5, 1.25, 2.0, 0.125, 3.0};
  io::write_depth(dir / "d.bin", d);
  CHECK(io::read_depth(dir / "d.bin").values == d.values);

  SegmentationMap seg(3, 2, 0);
  seg.values = {0, 1, 2, 3, 2, 1};
  io::write_labels(dir / "l.bin", seg);
  CHECK(io::read_labels(dir / "l.bin").values == seg.values);

  ProbabilityStack s(2, 2, 3, 2);
  Rng rng(5);
  for (std::size_t i = 0; i < s.pixels() * 2; ++i) {
    const float p = static_cast<float>(rng.uniform());
    const std::size_t k = i / s.pixels(), px = i % s.pixels();
    s.plane(static_cast<int>(k), 0)[px] = p;
    s.plane(static_cast<int>(k), 1)[px] = 1.0f - p;
  }
  io::write_stack(dir / "s.bin", s);
  const auto back = io::read_stack(dir / "s.bin");
  CHECK(back.inferences == 2);
  CHECK(back.classes == 2);
  CHECK(back.data == s.data);

  io::write_text(dir / "short.bin", "abc");
  CHECK_THROWS_AS(io::read_depth(dir / "short.bin"), DataError);
  CHECK_THROWS_AS(io::read_stack(dir / "missing.bin"), DataError);
}

TEST_CASE("ply round trip keeps doubles exactly") {
  const auto dir = temp_dir("ply");
  io::PlyTable t;
  t.points = {Vec3(0.1, -2.0 / 3.0, 1e-17), Vec3(1e6, 0.0, -0.0)};
  t.add_property("part", {1, 2}, true);
  t.add_property("weight", {0.125, 1.0 / 3.0});
  io::write_ply(dir / "a.ply", t);
  const auto back = io::read_ply(dir / "a.ply");
  REQUIRE(back.points.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(back.points[i] == t.points[i]);
  CHECK(back.property("part") == std::vector<double>{1, 2});
  CHECK(back.property("weight") == t.property("weight"));
  CHECK_THROWS(back.property("nope"));
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(2.0) == "2");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
