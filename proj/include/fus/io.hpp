// Raster and point-cloud file formats.
//
// Float rasters: u32 width, u32 height (little-endian), then width*height
// little-endian float32 values, row-major.
// Label rasters: same header, then one byte per pixel.
// Probability stacks: u32 K, u32 C, u32 width, u32 height, then K*C*H*W
// float32 values laid out [k][c][row][col].
// Point clouds: ASCII PLY, one vertex element, double-valued x/y/z plus
// caller-named scalar properties.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fus/core.hpp"

namespace fus::io {

void write_float_raster(const std::filesystem::path& path, const Raster<double>& raster);
Raster<double> read_float_raster(const std::filesystem::path& path);

void write_depth(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_depth(const std::filesystem::path& path);

void write_labels(const std::filesystem::path& path, const SegmentationMap& seg);
SegmentationMap read_labels(const std::filesystem::path& path);

void write_stack(const std::filesystem::path& path, const ProbabilityStack& stack);
ProbabilityStack read_stack(const std::filesystem::path& path);

/// Vertex table of an ASCII PLY file.
struct PlyTable {
  std::vector<Vec3> points;
  std::vector<std::string> property_names;     // beyond x, y, z
  std::vector<std::vector<double>> properties;  // one column per name
  std::vector<bool> integral;                  // written as int when true

  void add_property(std::string name, std::vector<double> column, bool is_integral = false);
  const std::vector<double>& property(const std::string& name) const;
};

void write_ply(const std::filesystem::path& path, const PlyTable& table);
PlyTable read_ply(const std::filesystem::path& path);

/// Cloud with per-vertex x, y, z, part, uncertainty.
void write_part_cloud(const std::filesystem::path& path, const PartPointCloud& cloud);

/// Writes a whole file atomically (temp file + rename).
void write_text(const std::filesystem::path& path, const std::string& contents);
std::string read_text(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace fus::io
