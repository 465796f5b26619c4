#include <catch2/catch_amalgamated.hpp>

#include "greenseg/ground_fit.hpp"
#include "greenseg/local_geometry.hpp"
#include "greenseg/spatial_index.hpp"
#include "test_helpers.hpp"

#include <random>

using namespace greenseg;

TEST_CASE("tiny radius query returns only the query point") {
  std::vector<Point3> pts = {Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0)};
  SpatialIndex index(pts, 0.05);
  auto hits = index.query_ball(Point3(0, 0, 0), 1e-6);
  REQUIRE(hits == std::vector<int>{0});
}

TEST_CASE("empty query region yields an empty set") {
  std::vector<Point3> pts = {Point3(0, 0, 0), Point3(1, 0, 0)};
  SpatialIndex index(pts, 0.05);
  CHECK(index.query_ball(Point3(5, 5, 5), 0.2).empty());
}

TEST_CASE("radius queries match the linear-scan oracle") {
  auto gen = test::rng(101);
  auto pts = test::random_points_box(gen, 10000, Point3(0, 0, 0), Point3(1, 1, 0.3));
  SpatialIndex index(pts, 0.05);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  for (int q = 0; q < 100; ++q) {
    Point3 center = pts[pick(gen)];
    auto fast = index.query_ball(center, 0.05);
    auto slow = test::linear_scan_ball(pts, center, 0.05);
    REQUIRE(fast == slow);
  }
}

TEST_CASE("radius queries beyond a cell width still match the oracle") {
  auto gen = test::rng(102);
  auto pts = test::random_points_box(gen, 3000, Point3(-1, -1, -1), Point3(1, 1, 1));
  SpatialIndex index(pts, 0.05);
  std::uniform_real_distribution<double> ur(0.0, 0.5);
  for (int q = 0; q < 50; ++q) {
    Point3 center = pts[static_cast<std::size_t>(q) * 37 % pts.size()];
    double r = ur(gen);
    CHECK(index.query_ball(center, r) == test::linear_scan_ball(pts, center, r));
  }
}

TEST_CASE("covariance of identical points is zero") {
  std::vector<Point3> pts(7, Point3(0.3, -0.1, 2.0));
  Eigen::Matrix3d c = local_covariance(pts);
  CHECK(c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("covariance of a symmetric pair is diagonal") {
  std::vector<Point3> pts = {Point3(1, 0, 0), Point3(-1, 0, 0)};
  Eigen::Matrix3d c = local_covariance(pts);
  CHECK(c(0, 0) == Catch::Approx(1.0));
  CHECK(std::abs(c(1, 1)) < 1e-15);
  CHECK(std::abs(c(2, 2)) < 1e-15);
}

TEST_CASE("covariance of a uniform cube approaches I/12") {
  auto gen = test::rng(404);
  auto pts = test::random_points_box(gen, 1000, Point3(-0.5, -0.5, -0.5),
                                     Point3(0.5, 0.5, 0.5));
  Eigen::Matrix3d c = local_covariance(pts);
  const double v = 1.0 / 12.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double expected = i == j ? v : 0.0;
      CHECK(std::abs(c(i, j) - expected) < 0.05 * v);
    }
}

TEST_CASE("planar covariance gives a vertical normal and zero curvature") {
  Eigen::Matrix3d c = Eigen::Vector3d(1.0, 1.0, 0.0).asDiagonal();
  auto [normal, kappa] = normal_and_curvature(c);
  CHECK((normal - Point3(0, 0, 1)).norm() < 1e-12);
  CHECK(kappa == 0.0);
}

TEST_CASE("isotropic covariance attains the 1/3 curvature bound") {
  Eigen::Matrix3d c = Eigen::Matrix3d::Identity() * 0.7;
  auto [normal, kappa] = normal_and_curvature(c);
  CHECK(kappa == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(normal.norm() == Catch::Approx(1.0));
  // canonical tie-break keeps a deterministic sign
  Point3 again = normal_and_curvature(c).first;
  CHECK((normal - again).norm() == 0.0);
}

TEST_CASE("zero covariance is handled as a degenerate single point") {
  auto [normal, kappa] = normal_and_curvature(Eigen::Matrix3d::Zero());
  CHECK(normal == Point3(0, 0, 1));
  CHECK(kappa == 0.0);
}

TEST_CASE("spherical cap curvature matches the closed-form oracle") {
  // Neighborhood of the pole of a sphere of radius R with query radius r:
  // a cap of half-angle alpha = 2 asin(r / 2R). With c = cos(alpha), the
  // area-uniform second moments give kappa = (1 - c) / (3 (3 + c)).
  const double R = 1.0, r = 0.2;
  const double alpha = 2.0 * std::asin(r / (2.0 * R));
  const double c = std::cos(alpha);
  const double kappa_expected = (1.0 - c) / (3.0 * (3.0 + c));

  auto gen = test::rng(777);
  std::uniform_real_distribution<double> uu(c, 1.0);
  std::uniform_real_distribution<double> uphi(0.0, 2.0 * M_PI);
  std::vector<Point3> pts;
  for (int i = 0; i < 20000; ++i) {
    double u = uu(gen), phi = uphi(gen);
    double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    pts.emplace_back(R * s * std::cos(phi), R * s * std::sin(phi), R * u);
  }
  auto [normal, kappa] = normal_and_curvature(local_covariance(pts));
  CHECK(std::abs(kappa - kappa_expected) / kappa_expected < 0.10);
  CHECK(std::abs(normal.z()) > 0.99);  // cap normal is vertical
}

TEST_CASE("curvature is rotation invariant") {
  auto gen = test::rng(888);
  auto pts = test::random_points_box(gen, 400, Point3(0, 0, 0), Point3(0.1, 0.1, 0.005));
  auto [n0, k0] = normal_and_curvature(local_covariance(pts));
  for (int t = 0; t < 10; ++t) {
    Eigen::Matrix3d rot = test::random_rotation(gen);
    std::vector<Point3> rpts;
    for (const auto& p : pts) rpts.push_back(rot * p);
    auto [n1, k1] = normal_and_curvature(local_covariance(rpts));
    CHECK(std::abs(k1 - k0) < 1e-9);
  }
}

TEST_CASE("consistency score basics") {
  Point3 n(0, 0, 1);
  CHECK(consistency_score(n, n) == 1.0);
  CHECK(consistency_score(Point3(1, 0, 0), n) == 0.0);
  CHECK(consistency_score(-n, n) == 1.0);  // orientation invariant
  auto gen = test::rng(11);
  for (int t = 0; t < 20; ++t) {
    Eigen::Matrix3d rot = test::random_rotation(gen);
    Point3 m = rot.col(2);
    CHECK(consistency_score(m, n) == consistency_score(-m, n));
  }
}

namespace {

/// Dense flat floor with every neighborhood complete.
LabeledCloud dense_ground_patch(double spacing = 0.008) {
  LabeledCloud cloud;
  cloud.frame_id = "base_link";
  for (double x = 0.3; x <= 0.8 + 1e-12; x += spacing)
    for (double y = -0.25; y <= 0.25 + 1e-12; y += spacing) {
      cloud.points.emplace_back(x, y, 0.0);
      cloud.labels.push_back(SemanticLabel::Ground);
    }
  return cloud;
}

}  // namespace

TEST_CASE("geometric filter keeps a dense flat floor intact") {
  SegParams params;
  LabeledCloud cloud = dense_ground_patch();
  Plane plane{Point3(0, 0, 1), 0.0};
  SpatialIndex index(cloud.points, params.r_neighbors);
  auto result = geometric_filter(cloud, plane, index, params);
  CHECK(result.reclassified.empty());
  CHECK(result.candidates.size() == cloud.size());
  for (const auto& s : result.surfaces) {
    CHECK(s.curvature < 1e-9);
    CHECK(s.rho > 1.0 - 1e-9);
    CHECK(s.neighbor_count >= params.n_neighbors_min);
  }
}

TEST_CASE("step edge points fail the consistency filter") {
  SegParams params;
  LabeledCloud cloud;
  cloud.frame_id = "base_link";
  const double spacing = 0.008;
  // Two levels 0.1 m apart joined by a riser at x = 0.6; every point is in
  // the putative ground band of the mid plane.
  for (double x = 0.3; x <= 0.9 + 1e-12; x += spacing)
    for (double y = -0.2; y <= 0.2 + 1e-12; y += spacing) {
      cloud.points.emplace_back(x, y, x < 0.6 ? 0.0 : 0.1);
      cloud.labels.push_back(SemanticLabel::Ground);
    }
  for (double z = 0.0; z <= 0.1 + 1e-12; z += spacing)
    for (double y = -0.2; y <= 0.2 + 1e-12; y += spacing) {
      cloud.points.emplace_back(0.6, y, z);
      cloud.labels.push_back(SemanticLabel::Ground);
    }
  Plane plane{Point3(0, 0, 1), -0.05};  // between the two levels
  SpatialIndex index(cloud.points, params.r_neighbors);
  auto result = geometric_filter(cloud, plane, index, params);

  std::vector<char> surviving(cloud.size(), 0);
  for (int idx : result.candidates) surviving[static_cast<std::size_t>(idx)] = 1;
  std::size_t edge_survivors = 0, interior_removed = 0, interior_total = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double dx = std::abs(cloud.points[i].x() - 0.6);
    if (dx <= params.r_neighbors && surviving[i]) ++edge_survivors;
    if (dx > 3 * params.r_neighbors) {
      ++interior_total;
      if (!surviving[i]) ++interior_removed;
    }
  }
  CHECK(edge_survivors == 0);
  CHECK(interior_removed == 0);
  CHECK(interior_total > 1000);
}

TEST_CASE("sparse clusters are reclassified noise") {
  SegParams params;
  LabeledCloud cloud = dense_ground_patch();
  std::size_t dense_count = cloud.size();
  // Isolated 10-point cluster far from the floor.
  for (int i = 0; i < 10; ++i) {
    cloud.points.emplace_back(2.0 + 0.001 * i, 2.0, 0.0);
    cloud.labels.push_back(SemanticLabel::Ground);
  }
  SpatialIndex index(cloud.points, params.r_neighbors);
  Plane plane{Point3(0, 0, 1), 0.0};
  auto result = geometric_filter(cloud, plane, index, params);
  std::size_t noise_count = 0;
  for (const auto& [idx, label] : result.reclassified) {
    if (static_cast<std::size_t>(idx) >= dense_count) {
      CHECK(label == SemanticLabel::Noise);
      ++noise_count;
    }
  }
  CHECK(noise_count == 10);
}

TEST_CASE("filter nesting: candidates are a subset of baseline ground") {
  auto gen = test::rng(2024);
  SegParams params;
  LabeledCloud cloud = dense_ground_patch(0.01);
  std::normal_distribution<double> g(0.0, 0.004);
  for (auto& p : cloud.points) p.z() += g(gen);
  // Sprinkle some non-ground labels; the filter must ignore them.
  for (std::size_t i = 0; i < cloud.size(); i += 17)
    cloud.labels[i] = SemanticLabel::Obstacle;
  Plane plane{Point3(0, 0, 1), 0.0};
  SpatialIndex index(cloud.points, params.r_neighbors);
  auto result = geometric_filter(cloud, plane, index, params);
  for (int idx : result.candidates)
    CHECK(cloud.labels[static_cast<std::size_t>(idx)] == SemanticLabel::Ground);
  for (const auto& [idx, label] : result.reclassified) {
    CHECK(cloud.labels[static_cast<std::size_t>(idx)] == SemanticLabel::Ground);
    CHECK((label == SemanticLabel::Obstacle || label == SemanticLabel::Noise));
  }
  CHECK(result.candidates.size() + result.reclassified.size() ==
        static_cast<std::size_t>(std::count(cloud.labels.begin(), cloud.labels.end(),
                                            SemanticLabel::Ground)));
}

TEST_CASE("rough tilled soil exceeds the default curvature budget") {
  // sigma = 15 mm roughness at the default 5 cm neighborhood implies
  // kappa well above 0.05, so the curvature filter trims such terrain.
  auto gen = test::rng(55);
  SegParams params;
  LabeledCloud cloud = dense_ground_patch(0.009);
  std::normal_distribution<double> g(0.0, 0.015);
  for (auto& p : cloud.points) {
    p.x() += g(gen);
    p.y() += g(gen);
    p.z() += g(gen);
  }
  Plane plane{Point3(0, 0, 1), 0.0};
  SpatialIndex index(cloud.points, params.r_neighbors);
  auto result = geometric_filter(cloud, plane, index, params);
  CHECK(result.candidates.size() < cloud.size() / 2);
}
