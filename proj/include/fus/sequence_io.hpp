// Sequence directory layout:
//   depth/NNNN.bin   noisy depth, float raster
//   gt/NNNN.bin      ground-truth labels, 8-bit raster
//   prob/NNNN.bin    K x C x H x W float probability stack
//   cam/NNNN.json    intrinsics + camera-to-world extrinsic
//   ref/part_C.ply   dense rest-pose reference surface of part C
//   manifest.json    scene spec, noise spec, seeds, tool version
#pragma once

#include <filesystem>

#include <json.hpp>

#include "fus/simulator.hpp"

namespace fus {

inline constexpr const char* kToolName = "fus";
inline constexpr const char* kToolVersion = "0.1.0";

namespace sim {

nlohmann::json to_json(const SceneSpec& spec);
SceneSpec scene_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NoiseSpec& noise);
/// Missing keys keep their defaults; unknown keys are rejected.
NoiseSpec noise_from_json(const nlohmann::json& j);

nlohmann::json camera_to_json(const CameraModel& cam, int width, int height);
CameraModel camera_from_json(const nlohmann::json& j);

/// Frame file name stem, e.g. 7 -> "0007".
std::string frame_stem(long frame);

/// Writes the whole directory through a temporary sibling that is renamed
/// into place; a failed write leaves nothing behind. `dir` must not exist
/// or be empty.
void write_sequence(const SceneSequence& seq, const std::filesystem::path& dir,
                    const nlohmann::json& run_config = nlohmann::json::object());

/// Loads a directory written by write_sequence. Clean depth is re-rendered
/// from the embedded scene spec. Corrupt frames raise DataError naming the
/// frame index.
SceneSequence read_sequence(const std::filesystem::path& dir);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace sim
}  // namespace fus
