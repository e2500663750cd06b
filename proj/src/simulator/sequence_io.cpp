#include <cstdio>
#include <set>
#include <string>

#include "fus/io.hpp"
#include "fus/sequence_io.hpp"

namespace fus::sim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json pose_to_json(const Rigid& pose) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(pose.linear()(r, c));
  const Vec3 t = pose.translation();
  return {{"rotation", rot}, {"translation", {t.x(), t.y(), t.z()}}};
}

Rigid pose_from_json(const json& j) {
  const auto& rot = j.at("rotation");
  const auto& tr = j.at("translation");
  if (rot.size() != 9 || tr.size() != 3) throw DataError("pose needs 9 rotation and 3 translation values");
  Rigid pose = Rigid::Identity();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) pose.linear()(r, c) = rot.at(static_cast<std::size_t>(r * 3 + c)).get<double>();
  pose.translation() = Vec3(tr[0].get<double>(), tr[1].get<double>(), tr[2].get<double>());
  return pose;
}

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

}  // namespace

std::string frame_stem(long frame) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04ld", frame);
  return buf;
}

json to_json(const SceneSpec& s) {
  json j;
  j["kind"] = std::string(kind_name(s.kind));
  j["seed"] = s.seed;
  j["table_z"] = s.table_z;
  j["body_width"] = s.body_width;
  j["body_height"] = s.body_height;
  j["body_depth"] = s.body_depth;
  j["facade_width"] = s.facade_width;
  j["facade_height"] = s.facade_height;
  j["facade_thickness"] = s.facade_thickness;
  j["border"] = s.border;
  j["base_radius"] = s.base_radius;
  j["base_height"] = s.base_height;
  j["handle_length"] = s.handle_length;
  j["handle_thickness"] = s.handle_thickness;
  j["handle_standoff"] = s.handle_standoff;
  j["handle_inset"] = s.handle_inset;
  j["joint_limit"] = s.joint_limit;
  j["intrinsics"] = {{"fx", s.intrinsics.fx}, {"fy", s.intrinsics.fy}, {"cx", s.intrinsics.cx},
                     {"cy", s.intrinsics.cy}, {"width", s.intrinsics.width}, {"height", s.intrinsics.height}};
  j["joint_values"] = s.joint_values;
  json poses = json::array();
  for (const auto& p : s.camera_poses) poses.push_back(pose_to_json(p));
  j["camera_poses"] = poses;
  j["parts"] = s.part_names();
  return j;
}

SceneSpec scene_from_json(const json& j) {
  try {
    SceneSpec s;
    s.kind = parse_kind(j.at("kind").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.table_z = j.at("table_z").get<double>();
    s.body_width = j.at("body_width").get<double>();
    s.body_height = j.at("body_height").get<double>();
    s.body_depth = j.at("body_depth").get<double>();
    s.facade_width = j.at("facade_width").get<double>();
    s.facade_height = j.at("facade_height").get<double>();
    s.facade_thickness = j.at("facade_thickness").get<double>();
    s.border = j.at("border").get<double>();
    s.base_radius = j.at("base_radius").get<double>();
    s.base_height = j.at("base_height").get<double>();
    s.handle_length = j.at("handle_length").get<double>();
    s.handle_thickness = j.at("handle_thickness").get<double>();
    s.handle_standoff = j.at("handle_standoff").get<double>();
    s.handle_inset = j.at("handle_inset").get<double>();
    s.joint_limit = j.at("joint_limit").get<double>();
    const auto& in = j.at("intrinsics");
    s.intrinsics.fx = in.at("fx").get<double>();
    s.intrinsics.fy = in.at("fy").get<double>();
    s.intrinsics.cx = in.at("cx").get<double>();
    s.intrinsics.cy = in.at("cy").get<double>();
    s.intrinsics.width = in.at("width").get<int>();
    s.intrinsics.height = in.at("height").get<int>();
    s.joint_values = j.at("joint_values").get<std::vector<double>>();
    for (const auto& p : j.at("camera_poses")) s.camera_poses.push_back(pose_from_json(p));
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed scene spec: ") + e.what());
  }
}

json to_json(const NoiseSpec& n) {
  return {{"depth_sigma", n.depth_sigma},
          {"salt_pepper_rate", n.salt_pepper_rate},
          {"max_range", n.max_range},
          {"logit_sigma", n.logit_sigma},
          {"logit_margin", n.logit_margin},
          {"blob_rate", n.blob_rate},
          {"blob_radius_min", n.blob_radius_min},
          {"blob_radius_max", n.blob_radius_max},
          {"blob_target", std::string(blob_target_name(n.blob_target))},
          {"blob_adjacency", n.blob_adjacency},
          {"boundary_jitter", n.boundary_jitter}};
}

NoiseSpec noise_from_json(const json& j) {
  static const std::set<std::string> known{"depth_sigma",     "salt_pepper_rate", "max_range",   "logit_sigma",
                                           "logit_margin",    "blob_rate",        "blob_radius_min",
                                           "blob_radius_max", "blob_target",      "blob_adjacency",
                                           "boundary_jitter"};
  reject_unknown(j, known, "noise");
  NoiseSpec n;
  read_opt(j, "depth_sigma", n.depth_sigma, "noise");
  read_opt(j, "salt_pepper_rate", n.salt_pepper_rate, "noise");
  read_opt(j, "max_range", n.max_range, "noise");
  read_opt(j, "logit_sigma", n.logit_sigma, "noise");
  read_opt(j, "logit_margin", n.logit_margin, "noise");
  read_opt(j, "blob_rate", n.blob_rate, "noise");
  read_opt(j, "blob_radius_min", n.blob_radius_min, "noise");
  read_opt(j, "blob_radius_max", n.blob_radius_max, "noise");
  if (j.contains("blob_target")) {
    std::string t;
    read_opt(j, "blob_target", t, "noise");
    n.blob_target = parse_blob_target(t);
  }
  read_opt(j, "blob_adjacency", n.blob_adjacency, "noise");
  read_opt(j, "boundary_jitter", n.boundary_jitter, "noise");
  n.validate();
  return n;
}

json camera_to_json(const CameraModel& cam, int width, int height) {
  json j = pose_to_json(cam.camera_to_world);
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  j["width"] = width;
  j["height"] = height;
  return j;
}

CameraModel camera_from_json(const json& j) {
  try {
    CameraModel cam;
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    cam.camera_to_world = pose_from_json(j);
    cam.validate();
    return cam;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed camera: ") + e.what());
  } catch (const InputError& e) {
    throw DataError(std::string("invalid camera: ") + e.what());
  }
}

json read_json(const fs::path& path) {
  try {
    return json::parse(io::read_text(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_sequence(const SceneSequence& seq, const fs::path& dir, const json& run_config) {
  if (fs::exists(dir) && !(fs::is_directory(dir) && fs::is_empty(dir)))
    throw DataError(dir.string() + " already exists and is not an empty directory");
  const fs::path tmp = dir.string() + ".partial";
  fs::remove_all(tmp);
  try {
    for (const char* sub : {"depth", "gt", "prob", "cam", "ref"}) fs::create_directories(tmp / sub);
    const int w = seq.spec.intrinsics.width, h = seq.spec.intrinsics.height;
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
      const auto& f = seq.frames[t];
      const std::string stem = frame_stem(static_cast<long>(t));
      io::write_depth(tmp / "depth" / (stem + ".bin"), f.depth);
      io::write_labels(tmp / "gt" / (stem + ".bin"), f.ground_truth);
      io::write_stack(tmp / "prob" / (stem + ".bin"), f.stack);
      io::write_text(tmp / "cam" / (stem + ".json"), camera_to_json(f.camera, w, h).dump(2) + "\n");
    }
    for (int c = 1; c < seq.classes(); ++c) {
      io::PlyTable table;
      table.points = seq.reference[static_cast<std::size_t>(c)];
      table.add_property("part", std::vector<double>(table.points.size(), c), true);
      io::write_ply(tmp / "ref" / ("part_" + std::to_string(c) + ".ply"), table);
    }
    json manifest;
    manifest["tool"] = kToolName;
    manifest["version"] = kToolVersion;
    manifest["kind"] = std::string(kind_name(seq.spec.kind));
    manifest["parts"] = seq.spec.part_names();
    manifest["classes"] = seq.classes();
    manifest["frames"] = seq.frames.size();
    manifest["inferences"] = seq.inferences;
    manifest["noise_seed"] = seq.noise_seed;
    manifest["scene"] = to_json(seq.spec);
    manifest["noise"] = to_json(seq.noise);
    manifest["config"] = run_config;
    io::write_text(tmp / "manifest.json", manifest.dump(2) + "\n");
    if (fs::exists(dir)) fs::remove(dir);
    fs::rename(tmp, dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
}

SceneSequence read_sequence(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError(dir.string() + " is not a sequence directory");
  const json manifest = read_json(dir / "manifest.json");
  SceneSequence seq;
  try {
    seq.spec = scene_from_json(manifest.at("scene"));
    seq.noise = noise_from_json(manifest.at("noise"));
    seq.noise_seed = manifest.at("noise_seed").get<std::uint64_t>();
    seq.inferences = manifest.at("inferences").get<int>();
    if (manifest.at("frames").get<int>() != seq.spec.frames()) throw DataError("manifest frame count mismatch");
  } catch (const json::exception& e) {
    throw DataError(dir.string() + "/manifest.json: " + e.what());
  } catch (const InputError& e) {
    throw DataError(dir.string() + "/manifest.json: " + e.what());
  }
  const int classes = seq.classes();
  const int w = seq.spec.intrinsics.width, h = seq.spec.intrinsics.height;
  seq.reference.resize(static_cast<std::size_t>(classes));
  for (int c = 1; c < classes; ++c)
    seq.reference[static_cast<std::size_t>(c)] = io::read_ply(dir / "ref" / ("part_" + std::to_string(c) + ".ply")).points;

  for (int t = 0; t < seq.spec.frames(); ++t) {
    const std::string stem = frame_stem(t);
    try {
      SequenceFrame f;
      f.depth = io::read_depth(dir / "depth" / (stem + ".bin"));
      f.depth.max_range = seq.noise.max_range;
      f.ground_truth = io::read_labels(dir / "gt" / (stem + ".bin"));
      f.stack = io::read_stack(dir / "prob" / (stem + ".bin"));
      f.camera = camera_from_json(read_json(dir / "cam" / (stem + ".json")));
      if (!f.depth.same_shape(w, h) || !f.ground_truth.same_shape(w, h) || f.stack.width != w ||
          f.stack.height != h || f.stack.classes != classes || f.stack.inferences != seq.inferences)
        throw DataError("dimensions disagree with the manifest");
      f.stack.validate();
      RenderedFrame clean = render_frame(seq.spec, t);
      f.clean_depth = clean.depth;
      for (double& v : f.clean_depth.values) v = static_cast<double>(static_cast<float>(v));
      f.part_transforms = std::move(clean.part_transforms);
      seq.frames.push_back(std::move(f));
    } catch (const std::exception& e) {
      throw DataError("frame " + std::to_string(t) + " of " + dir.string() + ": " + e.what());
    }
  }
  return seq;
}

}  // namespace fus::sim
