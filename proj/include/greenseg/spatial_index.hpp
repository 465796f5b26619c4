#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "greenseg/types.hpp"

namespace greenseg {

/// Uniform-grid index over a fixed point set answering exact closed-ball
/// queries: every index j with ||p_j - q|| <= r, no misses, no duplicates.
/// Cells are keyed by a bijective packing, so bucket lookups never alias.
class SpatialIndex {
 public:
  explicit SpatialIndex(std::span<const Point3> points, double cell_size = 0.05)
      : points_(points.begin(), points.end()),
        cell_(cell_size > 0.0 ? cell_size : 0.05) {
    buckets_.reserve(points_.size());
    for (int i = 0; i < static_cast<int>(points_.size()); ++i)
      buckets_[pack(cell_of(points_[static_cast<std::size_t>(i)]))].push_back(i);
  }

  std::size_t size() const { return points_.size(); }

  /// Appends matching indices to out (ascending order).
  void query_ball(const Point3& q, double r, std::vector<int>& out) const {
    out.clear();
    if (r < 0.0 || points_.empty()) return;
    const double r2 = r * r;
    const Eigen::Vector3i lo = cell_of(q - Point3::Constant(r));
    const Eigen::Vector3i hi = cell_of(q + Point3::Constant(r));
    for (int ix = lo.x(); ix <= hi.x(); ++ix)
      for (int iy = lo.y(); iy <= hi.y(); ++iy)
        for (int iz = lo.z(); iz <= hi.z(); ++iz) {
          auto it = buckets_.find(pack({ix, iy, iz}));
          if (it == buckets_.end()) continue;
          for (int j : it->second)
            if ((points_[static_cast<std::size_t>(j)] - q).squaredNorm() <= r2)
              out.push_back(j);
        }
    std::sort(out.begin(), out.end());
  }

  std::vector<int> query_ball(const Point3& q, double r) const {
    std::vector<int> out;
    query_ball(q, r, out);
    return out;
  }

 private:
  Eigen::Vector3i cell_of(const Point3& p) const {
    return {static_cast<int>(std::floor(p.x() / cell_)),
            static_cast<int>(std::floor(p.y() / cell_)),
            static_cast<int>(std::floor(p.z() / cell_))};
  }

  // 21 bits per axis, offset to keep coordinates positive; covers +-1e5 m
  // at centimeter cells which is far beyond any supported scene.
  static std::uint64_t pack(const Eigen::Vector3i& c) {
    constexpr std::int64_t kOffset = 1 << 20;
    return (static_cast<std::uint64_t>(c.x() + kOffset) << 42) |
           (static_cast<std::uint64_t>(c.y() + kOffset) << 21) |
           static_cast<std::uint64_t>(c.z() + kOffset);
  }

  std::vector<Point3> points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

}  // namespace greenseg
