#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "greenseg/errors.hpp"
#include "greenseg/types.hpp"

namespace greenseg {

inline constexpr const char* kLabeledHeader = "# greenseg-labeled v1";

struct ReadCloudResult {
  PointCloud cloud;
  std::size_t dropped_non_finite = 0;
};

namespace detail {

inline std::string trim_copy(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_double_token(const std::string& tok, double& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto res = std::from_chars(b, e, out);
  if (res.ec == std::errc() && res.ptr == e) return true;
  // from_chars on libstdc++ rejects nan/inf spellings; fall back to strtod.
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && !tok.empty();
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

inline ReadCloudResult read_ply(std::ifstream& in, const std::string& path) {
  std::string line;
  std::size_t line_no = 1;  // "ply" magic already consumed
  long vertex_count = -1;
  std::vector<std::string> vertex_props;
  bool in_vertex_element = false;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "comment") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2 || toks[1] != "ascii")
        throw ParseError(path, line_no, "only ascii PLY is supported");
    } else if (toks[0] == "element") {
      if (toks.size() < 3) throw ParseError(path, line_no, "malformed element");
      if (toks[1] == "vertex") {
        in_vertex_element = true;
        vertex_count = std::stol(toks[2]);
      } else {
        in_vertex_element = false;
        if (std::stol(toks[2]) != 0)
          throw ParseError(path, line_no, "unsupported non-empty element '" + toks[1] + "'");
      }
    } else if (toks[0] == "property") {
      if (in_vertex_element) {
        if (toks.size() < 3 || (toks[1] != "float" && toks[1] != "double" && toks[1] != "float32" && toks[1] != "float64"))
          throw ParseError(path, line_no, "vertex properties must be float or double");
        vertex_props.push_back(toks.back());
      }
    } else if (toks[0] == "end_header") {
      header_done = true;
      break;
    } else {
      throw ParseError(path, line_no, "unexpected header line '" + toks[0] + "'");
    }
  }
  if (!header_done) throw ParseError(path, line_no, "missing end_header");
  if (vertex_count < 0) throw ParseError(path, line_no, "missing vertex element");

  long ix = -1, iy = -1, iz = -1;
  for (std::size_t i = 0; i < vertex_props.size(); ++i) {
    if (vertex_props[i] == "x") ix = static_cast<long>(i);
    if (vertex_props[i] == "y") iy = static_cast<long>(i);
    if (vertex_props[i] == "z") iz = static_cast<long>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0)
    throw ParseError(path, line_no, "vertex element lacks x/y/z properties");

  ReadCloudResult result;
  result.cloud.points.reserve(static_cast<std::size_t>(vertex_count));
  for (long v = 0; v < vertex_count; ++v) {
    if (!std::getline(in, line))
      throw ParseError(path, line_no, "unexpected end of file in vertex data");
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty()) { --v; continue; }
    if (toks.size() < vertex_props.size())
      throw ParseError(path, line_no, "vertex row has too few columns");
    Point3 p;
    double c[3];
    const long idx[3] = {ix, iy, iz};
    for (int k = 0; k < 3; ++k) {
      if (!parse_double_token(toks[static_cast<std::size_t>(idx[k])], c[k]))
        throw ParseError(path, line_no, "invalid coordinate '" + toks[static_cast<std::size_t>(idx[k])] + "'");
    }
    p = Point3(c[0], c[1], c[2]);
    if (is_finite(p)) result.cloud.points.push_back(p);
    else ++result.dropped_non_finite;
  }
  if (result.cloud.points.empty())
    throw EmptyCloudError("empty cloud: " + path);
  return result;
}

inline ReadCloudResult read_xyz(std::ifstream& in, const std::string& path,
                                const std::string& first_line) {
  ReadCloudResult result;
  std::string line = first_line;
  std::size_t line_no = 1;
  bool have_line = true;
  while (have_line) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (!toks.empty()) {
      if (toks.size() != 3)
        throw ParseError(path, line_no, "expected 3 columns, got " + std::to_string(toks.size()));
      double c[3];
      for (int k = 0; k < 3; ++k) {
        if (!parse_double_token(toks[static_cast<std::size_t>(k)], c[k]))
          throw ParseError(path, line_no, "invalid coordinate '" + toks[static_cast<std::size_t>(k)] + "'");
      }
      Point3 p(c[0], c[1], c[2]);
      if (is_finite(p)) result.cloud.points.push_back(p);
      else ++result.dropped_non_finite;
    }
    have_line = static_cast<bool>(std::getline(in, line));
    ++line_no;
  }
  if (result.cloud.points.empty())
    throw EmptyCloudError("empty cloud: " + path);
  return result;
}

}  // namespace detail

/// Reads an ASCII PLY (element vertex with float x,y,z) or a
/// whitespace-delimited XYZ file. Non-finite rows are dropped and counted.
inline ReadCloudResult read_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cloud file: " + path);
  std::string first;
  if (!std::getline(in, first)) throw EmptyCloudError("empty cloud: " + path);
  if (detail::trim_copy(first) == "ply") return detail::read_ply(in, path);
  return detail::read_xyz(in, path, first);
}

inline void write_ply(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write cloud file: " + path);
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << cloud.points.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "end_header\n";
  char buf[96];
  for (const auto& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f\n", p.x(), p.y(), p.z());
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

/// Labeled text format: header line, then "x y z label" rows with six
/// fractional digits (micrometer resolution).
inline void write_labeled(const std::string& path, const LabeledCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write labeled file: " + path);
  out << kLabeledHeader << "\n";
  char buf[112];
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %d\n", p.x(), p.y(), p.z(),
                  label_code(cloud.labels[i]));
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

inline LabeledCloud read_labeled(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open labeled file: " + path);
  std::string line;
  if (!std::getline(in, line) || detail::trim_copy(line) != kLabeledHeader)
    throw ParseError(path, 1, std::string("expected header '") + kLabeledHeader + "'");
  LabeledCloud cloud;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 4)
      throw ParseError(path, line_no, "expected 'x y z label'");
    double c[3];
    for (int k = 0; k < 3; ++k) {
      if (!detail::parse_double_token(toks[static_cast<std::size_t>(k)], c[k]))
        throw ParseError(path, line_no, "invalid coordinate '" + toks[static_cast<std::size_t>(k)] + "'");
    }
    Point3 p(c[0], c[1], c[2]);
    if (!is_finite(p))
      throw ParseError(path, line_no, "non-finite coordinate");
    int code;
    try {
      code = std::stoi(toks[3]);
    } catch (const std::exception&) {
      throw ParseError(path, line_no, "invalid label '" + toks[3] + "'");
    }
    if (!is_valid_label_code(code))
      throw ParseError(path, line_no, "invalid label code " + std::to_string(code));
    cloud.points.push_back(p);
    cloud.labels.push_back(label_from_code(code));
  }
  return cloud;
}

}  // namespace greenseg
