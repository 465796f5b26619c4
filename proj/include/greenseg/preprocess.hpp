#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greenseg/errors.hpp"
#include "greenseg/params.hpp"
#include "greenseg/types.hpp"

namespace greenseg {

inline double planar_radius(const Point3& p) {
  return std::sqrt(p.x() * p.x() + p.y() * p.y());
}

/// Applies R*p + t to every point and renames the frame to "base_link".
inline PointCloud transform_to_base(const PointCloud& cloud, const RigidTransform& tf) {
  PointCloud out;
  out.frame_id = "base_link";
  out.stamp = cloud.stamp;
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points) out.points.push_back(tf.apply(p));
  return out;
}

/// Keeps points with planar radius >= d_min (closed boundary). Order preserved.
inline PointCloud radial_prefilter(const PointCloud& cloud, double d_min) {
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.stamp = cloud.stamp;
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points)
    if (planar_radius(p) >= d_min) out.points.push_back(p);
  return out;
}

/// Keeps points within d_max of the origin, planar by default.
inline PointCloud range_filter(const PointCloud& cloud, double d_max,
                               RangeMetric metric = RangeMetric::Planar) {
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.stamp = cloud.stamp;
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points) {
    double d = metric == RangeMetric::Planar ? planar_radius(p) : p.norm();
    if (d <= d_max) out.points.push_back(p);
  }
  return out;
}

/// Per-frame transforms keyed by stamp for batch replays, plus a default
/// entry used when no stamp matches.
class TransformTable {
 public:
  void set_default(const RigidTransform& tf) { default_ = tf; }
  void insert(double stamp, const RigidTransform& tf) { by_stamp_[stamp] = tf; }

  const RigidTransform& lookup(std::optional<double> stamp = std::nullopt) const {
    if (stamp) {
      auto it = by_stamp_.find(*stamp);
      if (it != by_stamp_.end()) return it->second;
    }
    return default_;
  }

  std::size_t size() const { return by_stamp_.size(); }

 private:
  RigidTransform default_{};
  std::map<double, RigidTransform> by_stamp_;
};

/// Transform config: key-value blocks. Keys: `translation = x y z`,
/// `rpy_deg = roll pitch yaw` or `rotation = r00 .. r22` (row-major);
/// an optional `stamp = t` line starts a per-stamp entry.
inline TransformTable load_transform_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open transform file: " + path);
  TransformTable table;
  RigidTransform current;
  std::optional<double> current_stamp;
  bool have_entry = false;

  auto commit = [&]() {
    if (!have_entry) return;
    if (!current.is_rigid(1e-9))
      throw ConfigError("transform in " + path + " is not a proper rotation");
    if (current_stamp) table.insert(*current_stamp, current);
    else table.set_default(current);
  };

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
    std::istringstream vs(value);
    if (key == "stamp") {
      commit();
      current = RigidTransform{};
      double t;
      if (!(vs >> t)) throw ParseError(path, line_no, "invalid stamp");
      current_stamp = t;
      have_entry = true;
    } else if (key == "translation") {
      double x, y, z;
      if (!(vs >> x >> y >> z)) throw ParseError(path, line_no, "translation needs 3 values");
      current.translation = Point3(x, y, z);
      have_entry = true;
    } else if (key == "rpy_deg") {
      double r, p, yw;
      if (!(vs >> r >> p >> yw)) throw ParseError(path, line_no, "rpy_deg needs 3 values");
      current.rotation = RigidTransform::from_rpy_deg(r, p, yw).rotation;
      have_entry = true;
    } else if (key == "rotation") {
      Eigen::Matrix3d m;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (!(vs >> m(i, j))) throw ParseError(path, line_no, "rotation needs 9 values");
      current.rotation = m;
      have_entry = true;
    } else {
      throw ConfigError("unknown key '" + key + "' in " + path + " (line " +
                        std::to_string(line_no) + ")");
    }
  }
  commit();
  return table;
}

}  // namespace greenseg
