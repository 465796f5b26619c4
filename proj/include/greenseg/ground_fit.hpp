#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "greenseg/errors.hpp"
#include "greenseg/params.hpp"
#include "greenseg/preprocess.hpp"
#include "greenseg/types.hpp"

namespace greenseg {

/// Signed perpendicular distance n^T p + d of a point from a plane.
inline double signed_distance(const Plane& plane, const Point3& p) {
  return plane.normal.dot(p) + plane.offset;
}

/// Least-squares plane through a point set: the normal is the unit
/// eigenvector of the centered covariance with minimum eigenvalue
/// (sign-canonicalized to n_z >= 0), the offset is -n^T centroid.
/// Throws DegenerateInput when the covariance rank is < 2.
inline Plane fit_plane_lsq(std::span<const Point3> points) {
  if (points.size() < 3)
    throw DegenerateInput("plane fit needs at least 3 points, got " +
                          std::to_string(points.size()));
  Point3 centroid = Point3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    Point3 d = p - centroid;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(cov);
  const auto& ev = es.eigenvalues();  // ascending
  if (!(ev(2) > 0.0) || ev(1) <= ev(2) * 1e-12)
    throw DegenerateInput("plane fit input is collinear or coincident");

  Plane plane;
  plane.normal = es.eigenvectors().col(0).normalized();
  plane.offset = -plane.normal.dot(centroid);
  return plane.canonicalized();
}

struct FitResult {
  Plane plane;
  std::vector<int> inliers;  // indices into the valid cloud, |delta| <= h_ground
  double rms_residual = 0.0;
  int iterations_used = 0;
};

/// Iterative ground-plane estimation. Starts from the horizontal plane z=0,
/// gathers inliers within h_ground, refits, and repeats up to
/// plane_iterations times or until the normal changes by less than 0.1 deg.
/// Returns nullopt when no iteration yields >= 3 usable inliers.
inline std::optional<FitResult> fit_ground_plane(const PointCloud& valid,
                                                 const SegParams& params) {
  Plane plane;  // z = 0 horizontal seed
  std::optional<FitResult> best;
  std::vector<Point3> gathered;
  constexpr double kConvergedRad = 0.1 * M_PI / 180.0;

  for (int iter = 1; iter <= params.plane_iterations; ++iter) {
    gathered.clear();
    for (const auto& p : valid.points)
      if (std::abs(signed_distance(plane, p)) <= params.h_ground)
        gathered.push_back(p);
    if (gathered.size() < 3) break;

    Plane refined;
    try {
      refined = fit_plane_lsq(gathered);
    } catch (const DegenerateInput&) {
      break;
    }
    double cosang = std::clamp(refined.normal.dot(plane.normal), -1.0, 1.0);
    double change = std::acos(std::abs(cosang));
    plane = refined;
    best = FitResult{plane, {}, 0.0, iter};
    if (iter > 1 && change < kConvergedRad) break;
  }
  if (!best) return std::nullopt;

  double sq_sum = 0.0;
  for (int i = 0; i < static_cast<int>(valid.points.size()); ++i) {
    double d = signed_distance(best->plane, valid.points[static_cast<std::size_t>(i)]);
    if (std::abs(d) <= params.h_ground) {
      best->inliers.push_back(i);
      sq_sum += d * d;
    }
  }
  best->rms_residual = best->inliers.empty()
                           ? 0.0
                           : std::sqrt(sq_sum / static_cast<double>(best->inliers.size()));
  return best;
}

/// Four-class labeling: ground if |delta| <= h_ground and the fitted plane
/// is within max_incline of horizontal; else obstacle if h_ground < z <=
/// robot_height; else above if z > robot_height; else noise.
inline LabeledCloud classify_points(const PointCloud& cloud, const Plane& plane,
                                    const SegParams& params) {
  LabeledCloud out;
  out.points = cloud.points;
  out.frame_id = cloud.frame_id;
  out.stamp = cloud.stamp;
  out.labels.reserve(cloud.points.size());
  const bool incline_ok = plane.incline_rad() <= params.max_incline_rad();
  for (const auto& p : cloud.points) {
    double delta = signed_distance(plane, p);
    SemanticLabel l;
    if (incline_ok && std::abs(delta) <= params.h_ground) l = SemanticLabel::Ground;
    else if (p.z() > params.h_ground && p.z() <= params.robot_height) l = SemanticLabel::Obstacle;
    else if (p.z() > params.robot_height) l = SemanticLabel::Above;
    else l = SemanticLabel::Noise;
    out.labels.push_back(l);
  }
  return out;
}

struct SegmentationResult {
  LabeledCloud labeled;            // one label per valid point
  PointCloud obstacles;            // points labeled obstacle
  std::vector<int> valid_indices;  // valid-cloud rows -> input cloud rows
  std::optional<FitResult> fit;    // nullopt: PlaneNotFound, all-noise output
};

inline PointCloud extract_obstacles(const LabeledCloud& labeled) {
  PointCloud out;
  out.frame_id = labeled.frame_id;
  out.stamp = labeled.stamp;
  for (std::size_t i = 0; i < labeled.points.size(); ++i)
    if (labeled.labels[i] == SemanticLabel::Obstacle)
      out.points.push_back(labeled.points[i]);
  return out;
}

/// Baseline ground-plane-fitting segmentation: transform, distance filters,
/// iterative plane fit, four-class labeling. When no plane is found the
/// frame is labeled all-noise (fail-safe), never left stale.
inline SegmentationResult baseline_segment(const PointCloud& cloud,
                                           const RigidTransform& tf,
                                           const SegParams& params) {
  PointCloud base = transform_to_base(cloud, tf);

  SegmentationResult result;
  PointCloud valid;
  valid.frame_id = base.frame_id;
  valid.stamp = base.stamp;
  for (int i = 0; i < static_cast<int>(base.points.size()); ++i) {
    const auto& p = base.points[static_cast<std::size_t>(i)];
    if (planar_radius(p) < params.min_distance) continue;
    double d = params.range_metric == RangeMetric::Planar ? planar_radius(p) : p.norm();
    if (d > params.max_distance) continue;
    valid.points.push_back(p);
    result.valid_indices.push_back(i);
  }

  result.fit = fit_ground_plane(valid, params);
  if (!result.fit) {
    result.labeled.points = valid.points;
    result.labeled.labels.assign(valid.points.size(), SemanticLabel::Noise);
    result.labeled.frame_id = valid.frame_id;
    result.labeled.stamp = valid.stamp;
    result.obstacles.frame_id = valid.frame_id;
    return result;
  }
  result.labeled = classify_points(valid, result.fit->plane, params);
  result.obstacles = extract_obstacles(result.labeled);
  return result;
}

}  // namespace greenseg
