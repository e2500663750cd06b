#include <charconv>
#include <cmath>
#include <sstream>

#include "fus/io.hpp"

namespace fus::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

void PlyTable::add_property(std::string name, std::vector<double> column, bool is_integral) {
  if (column.size() != points.size()) throw InputError("PLY property '" + name + "' has wrong length");
  property_names.push_back(std::move(name));
  properties.push_back(std::move(column));
  integral.push_back(is_integral);
}

const std::vector<double>& PlyTable::property(const std::string& name) const {
  for (std::size_t i = 0; i < property_names.size(); ++i)
    if (property_names[i] == name) return properties[i];
  throw DataError("PLY has no property '" + name + "'");
}

void write_ply(const std::filesystem::path& path, const PlyTable& table) {
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << table.points.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  for (std::size_t i = 0; i < table.property_names.size(); ++i)
    out << "property " << (table.integral[i] ? "int " : "double ") << table.property_names[i] << "\n";
  out << "end_header\n";
  for (std::size_t r = 0; r < table.points.size(); ++r) {
    const Vec3& p = table.points[r];
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z());
    for (std::size_t i = 0; i < table.properties.size(); ++i) {
      const double v = table.properties[i][r];
      out << ' ';
      if (table.integral[i])
        out << static_cast<long long>(v);
      else
        out << format_double(v);
    }
    out << '\n';
  }
  write_text(path, out.str());
}

PlyTable read_ply(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "ply") throw DataError(path.string() + ": not a PLY file");
  std::size_t vertices = 0;
  std::vector<std::string> names;
  std::vector<bool> integral;
  bool header_done = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw DataError(path.string() + ": only ASCII PLY is supported");
    } else if (word == "element") {
      std::string kind;
      ls >> kind >> vertices;
      if (kind != "vertex") throw DataError(path.string() + ": unexpected element '" + kind + "'");
    } else if (word == "property") {
      std::string type, name;
      ls >> type >> name;
      names.push_back(name);
      integral.push_back(type == "int" || type == "uchar" || type == "uint");
    } else if (word == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw DataError(path.string() + ": missing end_header");
  if (names.size() < 3 || names[0] != "x" || names[1] != "y" || names[2] != "z")
    throw DataError(path.string() + ": first properties must be x, y, z");

  PlyTable table;
  table.points.resize(vertices);
  const std::size_t extra = names.size() - 3;
  table.property_names.assign(names.begin() + 3, names.end());
  table.integral.assign(integral.begin() + 3, integral.end());
  table.properties.assign(extra, std::vector<double>(vertices));
  for (std::size_t r = 0; r < vertices; ++r) {
    if (!std::getline(in, line)) throw DataError(path.string() + ": truncated at vertex " + std::to_string(r));
    const char* p = line.c_str();
    const char* end = p + line.size();
    auto next = [&](double& v) {
      while (p < end && *p == ' ') ++p;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) throw DataError(path.string() + ": bad number at vertex " + std::to_string(r));
      p = res.ptr;
    };
    double x, y, z;
    next(x);
    next(y);
    next(z);
    table.points[r] = Vec3(x, y, z);
    for (std::size_t i = 0; i < extra; ++i) next(table.properties[i][r]);
  }
  return table;
}

void write_part_cloud(const std::filesystem::path& path, const PartPointCloud& cloud) {
  PlyTable table;
  std::vector<double> part, unc;
  for (int c = 0; c < cloud.classes(); ++c) {
    const auto& pp = cloud.parts[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < pp.size(); ++i) {
      table.points.push_back(pp.points[i]);
      part.push_back(c);
      unc.push_back(pp.uncertainty[i]);
    }
  }
  table.add_property("part", std::move(part), true);
  table.add_property("uncertainty", std::move(unc));
  write_ply(path, table);
}

}  // namespace fus::io
