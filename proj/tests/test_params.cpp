#include <catch2/catch_amalgamated.hpp>

#include "greenseg/params.hpp"
#include "greenseg/types.hpp"
#include "test_helpers.hpp"

#include <fstream>

using namespace greenseg;

TEST_CASE("default parameters are accepted") {
  SegParams p;
  REQUIRE_NOTHROW(validate_params(p));
  CHECK(p.h_ground == 0.12);
  CHECK(p.max_incline_deg == 30.0);
  CHECK(p.robot_height == 0.5);
  CHECK(p.n_neighbors_min == 30);
  CHECK(p.r_neighbors == 0.05);
  CHECK(p.rho_min == 0.90);
  CHECK(p.kappa_max == 0.05);
  CHECK(p.r_growing == 0.05);
  CHECK(p.max_distance == 3.0);
  CHECK(p.min_distance == 0.3);
  CHECK(p.noise_kappa_split() == p.kappa_max);
}

TEST_CASE("rho_min out of range is rejected with the field name") {
  SegParams p;
  p.rho_min = 1.2;
  REQUIRE_THROWS_MATCHES(validate_params(p), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("rho_min out of (0,1]")));
}

TEST_CASE("inverted distance bounds are rejected") {
  SegParams p;
  p.min_distance = 3.0;
  p.max_distance = 0.3;
  REQUIRE_THROWS_AS(validate_params(p), ConfigError);
}

TEST_CASE("validate_params is idempotent") {
  SegParams p;
  p.rho_min = 0.85;
  p.kappa_max = 0.1;
  SegParams once = validate_params(p);
  SegParams twice = validate_params(once);
  CHECK(once.rho_min == twice.rho_min);
  CHECK(once.kappa_max == twice.kappa_max);
  CHECK(once.noise_kappa_split() == twice.noise_kappa_split());
}

TEST_CASE("kappa_max above 1/3 is rejected") {
  SegParams p;
  p.kappa_max = 0.4;
  REQUIRE_THROWS_AS(validate_params(p), ConfigError);
}

TEST_CASE("config file round trip with table names") {
  test::TempDir dir("params");
  auto path = dir.file("greenseg.cfg");
  {
    std::ofstream out(path);
    out << "# GreenSeg parameters\n"
        << "max_surface_height = 0.12\n"
        << "max_incline = 30.0\n"
        << "robot_height = 0.5\n"
        << "n_neighbors = 30\n"
        << "r_neighbors = 0.05\n"
        << "rho_min = 0.90\n"
        << "kappa_max = 0.05\n"
        << "r_growing = 0.05\n"
        << "max_distance_filtered = 3.0\n"
        << "min_distance_filtered = 0.3\n"
        << "plane_iterations = 3\n"
        << "noise_kappa_split = 0.05\n";
  }
  SegParams p = load_params(path);
  CHECK(p.h_ground == 0.12);
  CHECK(p.n_neighbors_min == 30);
  CHECK(p.noise_kappa_split() == 0.05);

  save_params(dir.file("copy.cfg"), p);
  SegParams q = load_params(dir.file("copy.cfg"));
  CHECK(q.rho_min == p.rho_min);
  CHECK(q.max_distance == p.max_distance);
}

TEST_CASE("unknown config keys are an error") {
  test::TempDir dir("params_unknown");
  auto path = dir.file("bad.cfg");
  {
    std::ofstream out(path);
    out << "sensor_height = 1.7\n";
  }
  REQUIRE_THROWS_MATCHES(load_params(path), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("sensor_height")));
}

TEST_CASE("noise_kappa_split defaults to kappa_max when not set") {
  test::TempDir dir("params_split");
  auto path = dir.file("split.cfg");
  {
    std::ofstream out(path);
    out << "kappa_max = 0.08\n";
  }
  SegParams p = load_params(path);
  CHECK(p.noise_kappa_split() == 0.08);
}

TEST_CASE("plane sign canonicalization keeps distances") {
  Plane plane;
  plane.normal = Point3(0.1, -0.2, -0.9).normalized();
  plane.offset = 0.4;
  Plane canon = plane.canonicalized();
  CHECK(canon.normal.z() >= 0.0);
  Point3 p(0.3, 1.0, -2.0);
  double d0 = plane.normal.dot(p) + plane.offset;
  double d1 = canon.normal.dot(p) + canon.offset;
  CHECK(std::abs(std::abs(d0) - std::abs(d1)) < 1e-12);
}

TEST_CASE("rigid transform validation") {
  RigidTransform tf = RigidTransform::from_rpy_deg(10.0, 30.0, -45.0, Point3(0.4, 0, 0.5));
  CHECK(tf.is_rigid());
  RigidTransform bad;
  bad.rotation(0, 0) = 2.0;
  CHECK_FALSE(bad.is_rigid());
}
