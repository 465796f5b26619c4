#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "greenseg/params.hpp"
#include "greenseg/spatial_index.hpp"
#include "greenseg/types.hpp"

namespace greenseg {

/// Per-point local surface description of a ground candidate.
struct LocalSurface {
  Point3 normal{0.0, 0.0, 1.0};  // unit local PCA normal m
  double curvature = 0.0;        // kappa = lambda_min / trace, in [0, 1/3]
  int neighbor_count = 0;        // |N_i| including the point itself
  double rho = 0.0;              // |m^T n| against the global plane normal
};

/// Population covariance (1/N) sum (p - mean)(p - mean)^T of a neighborhood.
inline Eigen::Matrix3d local_covariance(std::span<const Point3> neighbors) {
  Point3 mean = Point3::Zero();
  for (const auto& p : neighbors) mean += p;
  mean /= static_cast<double>(neighbors.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : neighbors) {
    Point3 d = p - mean;
    cov.noalias() += d * d.transpose();
  }
  return cov / static_cast<double>(neighbors.size());
}

/// Smallest-eigenvalue eigenvector (sign-canonicalized toward +z, ties
/// toward +x then +y) and curvature lambda_min / (l1+l2+l3). A zero-trace
/// covariance (single or coincident points) yields normal (0,0,1), kappa 0.
inline std::pair<Point3, double> normal_and_curvature(const Eigen::Matrix3d& cov) {
  const double trace = cov.trace();
  if (!(trace > 0.0)) return {Point3(0.0, 0.0, 1.0), 0.0};
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(cov);
  Point3 normal = canonical_direction(es.eigenvectors().col(0).normalized());
  double kappa = std::max(0.0, es.eigenvalues()(0)) / trace;
  return {normal, kappa};
}

/// Absolute cosine similarity of two unit normals, clamped into [0,1].
inline double consistency_score(const Point3& m, const Point3& n) {
  return std::min(1.0, std::abs(m.dot(n)));
}

struct GeometricFilterResult {
  std::vector<int> candidates;         // surviving ground candidates (cloud rows)
  std::vector<LocalSurface> surfaces;  // parallel to candidates
  std::vector<std::pair<int, SemanticLabel>> reclassified;  // demoted rows
};

/// Dual-layer validation of the baseline ground set: points with sparse
/// neighborhoods become noise; points whose local normal disagrees with the
/// global plane (rho < rho_min) or whose curvature exceeds kappa_max are
/// demoted to obstacle (kappa <= noise_kappa_split) or noise. Neighborhoods
/// are searched over the full valid cloud so edge points see their
/// non-ground neighbors.
inline GeometricFilterResult geometric_filter(const LabeledCloud& labeled,
                                              const Plane& plane,
                                              const SpatialIndex& index,
                                              const SegParams& params) {
  GeometricFilterResult result;
  std::vector<int> nbrs;
  std::vector<Point3> nbr_pts;
  for (int i = 0; i < static_cast<int>(labeled.points.size()); ++i) {
    if (labeled.labels[static_cast<std::size_t>(i)] != SemanticLabel::Ground) continue;
    index.query_ball(labeled.points[static_cast<std::size_t>(i)], params.r_neighbors, nbrs);
    const int count = static_cast<int>(nbrs.size());
    if (count < params.n_neighbors_min) {
      result.reclassified.emplace_back(i, SemanticLabel::Noise);
      continue;
    }
    nbr_pts.clear();
    for (int j : nbrs) nbr_pts.push_back(labeled.points[static_cast<std::size_t>(j)]);
    auto [m, kappa] = normal_and_curvature(local_covariance(nbr_pts));
    const double rho = consistency_score(m, plane.normal);
    if (rho < params.rho_min || kappa > params.kappa_max) {
      SemanticLabel demoted = kappa <= params.noise_kappa_split()
                                  ? SemanticLabel::Obstacle
                                  : SemanticLabel::Noise;
      result.reclassified.emplace_back(i, demoted);
      continue;
    }
    result.candidates.push_back(i);
    result.surfaces.push_back(LocalSurface{m, kappa, count, rho});
  }
  return result;
}

}  // namespace greenseg
