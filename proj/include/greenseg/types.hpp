#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace greenseg {

using Point3 = Eigen::Vector3d;

/// Semantic classes assigned by the segmentation pipeline. Undefined is
/// reserved for ground-truth voxel maps and never appears in pipeline output.
enum class SemanticLabel : std::uint8_t {
  Ground = 0,
  Obstacle = 1,
  Above = 2,
  Noise = 3,
  Undefined = 255,
};

inline int label_code(SemanticLabel l) { return static_cast<int>(l); }

inline bool is_valid_label_code(int code) {
  return code == 0 || code == 1 || code == 2 || code == 3 || code == 255;
}

inline SemanticLabel label_from_code(int code) {
  return static_cast<SemanticLabel>(code);
}

inline const char* label_name(SemanticLabel l) {
  switch (l) {
    case SemanticLabel::Ground: return "ground";
    case SemanticLabel::Obstacle: return "obstacle";
    case SemanticLabel::Above: return "above";
    case SemanticLabel::Noise: return "noise";
    case SemanticLabel::Undefined: return "undefined";
  }
  return "unknown";
}

inline bool is_finite(const Point3& p) {
  return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

/// Ordered set of 3-D points, meters, in a named reference frame.
struct PointCloud {
  std::vector<Point3> points;
  std::string frame_id = "sensor";
  std::optional<double> stamp;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Points paired with semantic labels; parallel arrays of equal length.
struct LabeledCloud {
  std::vector<Point3> points;
  std::vector<SemanticLabel> labels;
  std::string frame_id = "base_link";
  std::optional<double> stamp;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool consistent() const { return points.size() == labels.size(); }
};

/// Deterministic sign canonicalization for unit directions: prefer +z,
/// ties broken toward +x, then +y.
inline Point3 canonical_direction(const Point3& v) {
  if (v.z() < 0.0) return -v;
  if (v.z() > 0.0) return v;
  if (v.x() < 0.0) return -v;
  if (v.x() > 0.0) return v;
  if (v.y() < 0.0) return -v;
  return v;
}

/// Plane n^T p + d = 0 with unit normal. The stored representative always
/// has normal.z >= 0 so the incline test theta = acos(n_z) is well defined.
struct Plane {
  Point3 normal{0.0, 0.0, 1.0};
  double offset = 0.0;

  Plane canonicalized() const {
    Plane out = *this;
    Point3 c = canonical_direction(normal);
    if ((c - normal).squaredNorm() > 0.0) {
      out.normal = c;
      out.offset = -offset;
    }
    return out;
  }

  bool is_unit(double tol = 1e-9) const {
    return std::abs(normal.norm() - 1.0) <= tol;
  }

  /// Angle of the normal from vertical, radians, in [0, pi/2] once canonical.
  double incline_rad() const {
    double nz = std::clamp(normal.z(), -1.0, 1.0);
    return std::acos(nz);
  }
};

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Point3 translation{0.0, 0.0, 0.0};

  static RigidTransform identity() { return {}; }

  /// Rz(yaw) * Ry(pitch) * Rx(roll), angles in degrees.
  static RigidTransform from_rpy_deg(double roll, double pitch, double yaw,
                                     const Point3& t = Point3::Zero()) {
    const double d2r = M_PI / 180.0;
    Eigen::AngleAxisd rz(yaw * d2r, Eigen::Vector3d::UnitZ());
    Eigen::AngleAxisd ry(pitch * d2r, Eigen::Vector3d::UnitY());
    Eigen::AngleAxisd rx(roll * d2r, Eigen::Vector3d::UnitX());
    RigidTransform tf;
    tf.rotation = (rz * ry * rx).toRotationMatrix();
    tf.translation = t;
    return tf;
  }

  Point3 apply(const Point3& p) const { return rotation * p + translation; }

  bool is_rigid(double tol = 1e-9) const {
    Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    if (err.cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(rotation.determinant() - 1.0) <= tol;
  }
};

}  // namespace greenseg
