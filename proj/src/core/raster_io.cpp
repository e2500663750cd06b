#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "fus/io.hpp"

namespace fus::io {
namespace {

static_assert(std::endian::native == std::endian::little, "raster IO assumes a little-endian host");

std::vector<char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<char>& bytes) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write to " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename into " + path.string() + ": " + ec.message());
}

void put_u32(std::vector<char>& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.insert(out.end(), b, b + 4);
}

std::uint32_t get_u32(const std::vector<char>& in, std::size_t offset) {
  std::uint32_t v;
  std::memcpy(&v, in.data() + offset, 4);
  return v;
}

void put_f32(std::vector<char>& out, float v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.insert(out.end(), b, b + 4);
}

float get_f32(const std::vector<char>& in, std::size_t offset) {
  float v;
  std::memcpy(&v, in.data() + offset, 4);
  return v;
}

std::vector<char> encode_floats(int w, int h, const std::vector<double>& values) {
  std::vector<char> out;
  out.reserve(8 + values.size() * 4);
  put_u32(out, static_cast<std::uint32_t>(w));
  put_u32(out, static_cast<std::uint32_t>(h));
  for (double v : values) put_f32(out, static_cast<float>(v));
  return out;
}

Raster<double> decode_floats(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() < 8) throw DataError(path.string() + ": truncated header");
  const std::uint32_t w = get_u32(bytes, 0);
  const std::uint32_t h = get_u32(bytes, 4);
  const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
  if (w == 0 || h == 0 || w > 1u << 16 || h > 1u << 16 || bytes.size() != 8 + n * 4)
    throw DataError(path.string() + ": size does not match header " + std::to_string(w) + "x" + std::to_string(h));
  Raster<double> r(static_cast<int>(w), static_cast<int>(h));
  for (std::uint64_t i = 0; i < n; ++i) r.values[i] = static_cast<double>(get_f32(bytes, 8 + i * 4));
  return r;
}

}  // namespace

void write_float_raster(const std::filesystem::path& path, const Raster<double>& raster) {
  write_bytes(path, encode_floats(raster.width, raster.height, raster.values));
}

Raster<double> read_float_raster(const std::filesystem::path& path) { return decode_floats(path); }

void write_depth(const std::filesystem::path& path, const DepthMap& depth) {
  write_bytes(path, encode_floats(depth.width, depth.height, depth.values));
}

DepthMap read_depth(const std::filesystem::path& path) {
  Raster<double> r = decode_floats(path);
  DepthMap d;
  d.width = r.width;
  d.height = r.height;
  d.values = std::move(r.values);
  return d;
}

void write_labels(const std::filesystem::path& path, const SegmentationMap& seg) {
  std::vector<char> out;
  out.reserve(8 + seg.values.size());
  put_u32(out, static_cast<std::uint32_t>(seg.width));
  put_u32(out, static_cast<std::uint32_t>(seg.height));
  for (std::uint8_t v : seg.values) out.push_back(static_cast<char>(v));
  write_bytes(path, out);
}

SegmentationMap read_labels(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() < 8) throw DataError(path.string() + ": truncated header");
  const std::uint32_t w = get_u32(bytes, 0);
  const std::uint32_t h = get_u32(bytes, 4);
  const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
  if (w == 0 || h == 0 || w > 1u << 16 || h > 1u << 16 || bytes.size() != 8 + n)
    throw DataError(path.string() + ": size does not match header");
  SegmentationMap seg(static_cast<int>(w), static_cast<int>(h));
  for (std::uint64_t i = 0; i < n; ++i) seg.values[i] = static_cast<std::uint8_t>(bytes[8 + i]);
  return seg;
}

void write_stack(const std::filesystem::path& path, const ProbabilityStack& stack) {
  std::vector<char> out;
  out.reserve(16 + stack.data.size() * 4);
  put_u32(out, static_cast<std::uint32_t>(stack.inferences));
  put_u32(out, static_cast<std::uint32_t>(stack.classes));
  put_u32(out, static_cast<std::uint32_t>(stack.width));
  put_u32(out, static_cast<std::uint32_t>(stack.height));
  for (float v : stack.data) put_f32(out, v);
  write_bytes(path, out);
}

ProbabilityStack read_stack(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() < 16) throw DataError(path.string() + ": truncated header");
  const std::uint32_t k = get_u32(bytes, 0);
  const std::uint32_t c = get_u32(bytes, 4);
  const std::uint32_t w = get_u32(bytes, 8);
  const std::uint32_t h = get_u32(bytes, 12);
  if (k == 0 || c == 0 || w == 0 || h == 0 || k > 1024 || c > 256 || w > 1u << 16 || h > 1u << 16)
    throw DataError(path.string() + ": implausible header");
  const std::uint64_t n = static_cast<std::uint64_t>(k) * c * w * h;
  if (bytes.size() != 16 + n * 4) throw DataError(path.string() + ": size does not match header");
  ProbabilityStack stack(static_cast<int>(k), static_cast<int>(c), static_cast<int>(w), static_cast<int>(h));
  for (std::uint64_t i = 0; i < n; ++i) stack.data[i] = get_f32(bytes, 16 + i * 4);
  return stack;
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  write_bytes(path, std::vector<char>(contents.begin(), contents.end()));
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

}  // namespace fus::io
