#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "greenseg/errors.hpp"

namespace greenseg {

enum class RangeMetric { Planar, Euclidean };

/// Segmentation parameters. Lengths in meters, angles in degrees at this
/// configuration boundary (converted to radians internally).
struct SegParams {
  double h_ground = 0.12;        // max perpendicular tolerance for ground
  double max_incline_deg = 30.0; // max permissible plane inclination
  double robot_height = 0.5;     // obstacle / above decision boundary
  int n_neighbors_min = 30;      // min neighborhood size for local normals
  double r_neighbors = 0.05;     // PCA neighborhood radius
  double rho_min = 0.90;         // min normal-consistency cosine
  double kappa_max = 0.05;       // max surface curvature
  double r_growing = 0.05;       // region-growing adjacency radius
  double max_distance = 3.0;     // max effective range
  double min_distance = 0.3;     // radial pre-filter cutoff
  int plane_iterations = 3;      // plane refit iterations
  RangeMetric range_metric = RangeMetric::Planar;

  /// Curvature split for reclassifying rejected ground candidates:
  /// kappa <= split -> obstacle, kappa > split -> noise. Defaults to
  /// kappa_max when not set explicitly.
  std::optional<double> noise_kappa_split_override;

  double noise_kappa_split() const {
    return noise_kappa_split_override.value_or(kappa_max);
  }

  double max_incline_rad() const { return max_incline_deg * M_PI / 180.0; }
};

/// Returns params unchanged if every invariant holds; otherwise throws a
/// ConfigError naming the first violated field.
inline SegParams validate_params(const SegParams& p) {
  if (!(p.h_ground > 0.0)) throw ConfigError("h_ground must be > 0");
  if (!(p.max_incline_deg > 0.0 && p.max_incline_deg < 90.0))
    throw ConfigError("max_incline out of (0,90)");
  if (!(p.robot_height > 0.0)) throw ConfigError("robot_height must be > 0");
  if (!(p.n_neighbors_min >= 1)) throw ConfigError("n_neighbors_min must be >= 1");
  if (!(p.r_neighbors > 0.0)) throw ConfigError("r_neighbors must be > 0");
  if (!(p.rho_min > 0.0 && p.rho_min <= 1.0)) throw ConfigError("rho_min out of (0,1]");
  if (!(p.kappa_max > 0.0 && p.kappa_max <= 1.0 / 3.0))
    throw ConfigError("kappa_max out of (0,1/3]");
  if (!(p.r_growing > 0.0)) throw ConfigError("r_growing must be > 0");
  if (!(p.min_distance > 0.0)) throw ConfigError("min_distance must be > 0");
  if (!(p.max_distance > 0.0)) throw ConfigError("max_distance must be > 0");
  if (!(p.min_distance < p.max_distance))
    throw ConfigError("min_distance must be < max_distance");
  if (!(p.plane_iterations >= 1)) throw ConfigError("plane_iterations must be >= 1");
  if (p.noise_kappa_split_override && !(*p.noise_kappa_split_override >= 0.0))
    throw ConfigError("noise_kappa_split must be >= 0");
  return p;
}

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool split_key_value(const std::string& line, std::string& key, std::string& value) {
  auto eq = line.find('=');
  if (eq != std::string::npos) {
    key = trim(line.substr(0, eq));
    value = trim(line.substr(eq + 1));
    return !key.empty();
  }
  std::istringstream ss(line);
  if (!(ss >> key)) return false;
  std::string rest;
  std::getline(ss, rest);
  value = trim(rest);
  return true;
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for '" + key + "': " + value);
  }
}

inline int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer value for '" + key + "': " + value);
  }
}

}  // namespace detail

/// Loads a flat key-value config file. Keys are the published parameter
/// names; unknown keys are an error. '#' starts a comment.
inline SegParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  SegParams p;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::string key, value;
    if (!detail::split_key_value(line, key, value) || value.empty())
      throw ParseError(path, line_no, "expected 'key = value'");
    if (key == "max_surface_height") p.h_ground = detail::parse_double(key, value);
    else if (key == "max_incline") p.max_incline_deg = detail::parse_double(key, value);
    else if (key == "robot_height") p.robot_height = detail::parse_double(key, value);
    else if (key == "n_neighbors") p.n_neighbors_min = detail::parse_int(key, value);
    else if (key == "r_neighbors") p.r_neighbors = detail::parse_double(key, value);
    else if (key == "rho_min") p.rho_min = detail::parse_double(key, value);
    else if (key == "kappa_max") p.kappa_max = detail::parse_double(key, value);
    else if (key == "r_growing") p.r_growing = detail::parse_double(key, value);
    else if (key == "max_distance_filtered") p.max_distance = detail::parse_double(key, value);
    else if (key == "min_distance_filtered") p.min_distance = detail::parse_double(key, value);
    else if (key == "plane_iterations") p.plane_iterations = detail::parse_int(key, value);
    else if (key == "noise_kappa_split") p.noise_kappa_split_override = detail::parse_double(key, value);
    else if (key == "range_metric") {
      if (value == "planar") p.range_metric = RangeMetric::Planar;
      else if (value == "euclidean") p.range_metric = RangeMetric::Euclidean;
      else throw ConfigError("range_metric must be 'planar' or 'euclidean'");
    } else {
      throw ConfigError("unknown key '" + key + "' in " + path + " (line " +
                        std::to_string(line_no) + ")");
    }
  }
  return validate_params(p);
}

inline void save_params(const std::string& path, const SegParams& p) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << "max_surface_height = " << p.h_ground << "\n"
      << "max_incline = " << p.max_incline_deg << "\n"
      << "robot_height = " << p.robot_height << "\n"
      << "n_neighbors = " << p.n_neighbors_min << "\n"
      << "r_neighbors = " << p.r_neighbors << "\n"
      << "rho_min = " << p.rho_min << "\n"
      << "kappa_max = " << p.kappa_max << "\n"
      << "r_growing = " << p.r_growing << "\n"
      << "max_distance_filtered = " << p.max_distance << "\n"
      << "min_distance_filtered = " << p.min_distance << "\n"
      << "plane_iterations = " << p.plane_iterations << "\n"
      << "noise_kappa_split = " << p.noise_kappa_split() << "\n"
      << "range_metric = " << (p.range_metric == RangeMetric::Planar ? "planar" : "euclidean")
      << "\n";
}

}  // namespace greenseg
