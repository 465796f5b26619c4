#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "greenseg/errors.hpp"
#include "greenseg/ground_fit.hpp"
#include "greenseg/local_geometry.hpp"
#include "greenseg/params.hpp"
#include "greenseg/spatial_index.hpp"
#include "greenseg/types.hpp"

namespace greenseg {

/// Connected region of candidate positions produced by the growing pass.
/// Members index into the candidate array; an empty region (seed -1)
/// represents the frame-level fail-safe.
struct Region {
  std::vector<int> members;
  int seed_index = -1;
};

/// Seed: the candidate closest to the robot origin in the xy plane.
/// Ties break toward the smallest index. Throws EmptyCandidates when the
/// candidate set is empty.
inline int select_seed(std::span<const Point3> candidate_points) {
  if (candidate_points.empty())
    throw EmptyCandidates("no ground candidates to seed region growing");
  int best = 0;
  double best_r2 = candidate_points[0].x() * candidate_points[0].x() +
                   candidate_points[0].y() * candidate_points[0].y();
  for (int i = 1; i < static_cast<int>(candidate_points.size()); ++i) {
    const auto& p = candidate_points[static_cast<std::size_t>(i)];
    double r2 = p.x() * p.x() + p.y() * p.y();
    if (r2 < best_r2) {
      best_r2 = r2;
      best = i;
    }
  }
  return best;
}

/// Worklist closure from the seed. A candidate joins iff it is within
/// h_ground of the global plane, normal-consistent at rho_min, and within
/// r_growing of a current member; the result is the seed's connected
/// component of condition-satisfying candidates, independent of expansion
/// order. Members are returned sorted.
inline Region grow_region(std::span<const Point3> candidate_points,
                          std::span<const LocalSurface> surfaces,
                          const Plane& plane, int seed, const SegParams& params) {
  const int n = static_cast<int>(candidate_points.size());
  Region region;
  region.seed_index = seed;
  if (n == 0 || seed < 0 || seed >= n) return region;

  std::vector<char> passes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double delta = signed_distance(plane, candidate_points[static_cast<std::size_t>(i)]);
    passes[static_cast<std::size_t>(i)] =
        std::abs(delta) <= params.h_ground &&
        surfaces[static_cast<std::size_t>(i)].rho >= params.rho_min;
  }

  SpatialIndex index(candidate_points, params.r_growing);
  std::vector<char> in_region(static_cast<std::size_t>(n), 0);
  std::vector<int> frontier{seed};
  std::vector<int> nbrs;
  in_region[static_cast<std::size_t>(seed)] = 1;
  while (!frontier.empty()) {
    int cur = frontier.back();
    frontier.pop_back();
    region.members.push_back(cur);
    index.query_ball(candidate_points[static_cast<std::size_t>(cur)], params.r_growing, nbrs);
    for (int j : nbrs) {
      if (in_region[static_cast<std::size_t>(j)] || !passes[static_cast<std::size_t>(j)])
        continue;
      in_region[static_cast<std::size_t>(j)] = 1;
      frontier.push_back(j);
    }
  }
  std::sort(region.members.begin(), region.members.end());
  return region;
}

/// Applies the verification verdicts to the baseline labeling: ground
/// candidates in the region stay ground; candidates outside it and points
/// already rejected by the geometric filter are conservatively promoted to
/// obstacle or noise (by the kappa split). Ground never grows.
inline SegmentationResult finalize_labels(const SegmentationResult& baseline,
                                          const GeometricFilterResult& filtered,
                                          const Region& region,
                                          const SegParams& params) {
  SegmentationResult out;
  out.labeled = baseline.labeled;
  out.valid_indices = baseline.valid_indices;
  out.fit = baseline.fit;

  for (const auto& [idx, label] : filtered.reclassified)
    out.labeled.labels[static_cast<std::size_t>(idx)] = label;

  std::vector<char> in_region(filtered.candidates.size(), 0);
  for (int pos : region.members) in_region[static_cast<std::size_t>(pos)] = 1;
  for (std::size_t k = 0; k < filtered.candidates.size(); ++k) {
    if (in_region[k]) continue;
    const auto row = static_cast<std::size_t>(filtered.candidates[k]);
    out.labeled.labels[row] = filtered.surfaces[k].curvature <= params.noise_kappa_split()
                                  ? SemanticLabel::Obstacle
                                  : SemanticLabel::Noise;
  }
  out.obstacles = extract_obstacles(out.labeled);
  return out;
}

/// Full GreenSeg pipeline: baseline segmentation, dual-layer geometric
/// validation, seeded region growing, conservative relabeling.
inline SegmentationResult greenseg_segment(const PointCloud& cloud,
                                           const RigidTransform& tf,
                                           const SegParams& params) {
  SegmentationResult base = baseline_segment(cloud, tf, params);
  if (!base.fit) return base;  // PlaneNotFound: all-noise fail-safe

  SpatialIndex index(base.labeled.points, params.r_neighbors);
  GeometricFilterResult filtered =
      geometric_filter(base.labeled, base.fit->plane, index, params);

  Region region;
  if (!filtered.candidates.empty()) {
    std::vector<Point3> candidate_points;
    candidate_points.reserve(filtered.candidates.size());
    for (int row : filtered.candidates)
      candidate_points.push_back(base.labeled.points[static_cast<std::size_t>(row)]);
    int seed = select_seed(candidate_points);
    region = grow_region(candidate_points, filtered.surfaces, base.fit->plane, seed, params);
  }
  return finalize_labels(base, filtered, region, params);
}

}  // namespace greenseg
