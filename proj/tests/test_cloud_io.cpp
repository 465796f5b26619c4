#include <catch2/catch_amalgamated.hpp>

#include "greenseg/cloud_io.hpp"
#include "test_helpers.hpp"

#include <fstream>
#include <random>

using namespace greenseg;

namespace {

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

}  // namespace

TEST_CASE("ascii ply with three vertices") {
  test::TempDir dir("ply3");
  auto path = dir.file("tri.ply");
  write_file(path,
             "ply\nformat ascii 1.0\nelement vertex 3\n"
             "property float x\nproperty float y\nproperty float z\n"
             "end_header\n0 0 0\n1 0 0\n0 1 0\n");
  auto res = read_cloud(path);
  REQUIRE(res.cloud.size() == 3);
  CHECK(res.dropped_non_finite == 0);
  CHECK(res.cloud.points[1] == Point3(1, 0, 0));
}

TEST_CASE("xyz row with nan is dropped and counted") {
  test::TempDir dir("xyznan");
  auto path = dir.file("pts.xyz");
  write_file(path, "0 0 0\nnan 0 0\n1 2 3\n");
  auto res = read_cloud(path);
  CHECK(res.cloud.size() == 2);
  CHECK(res.dropped_non_finite == 1);
  for (const auto& p : res.cloud.points) CHECK(is_finite(p));
}

TEST_CASE("zero-vertex ply is an empty-cloud error") {
  test::TempDir dir("ply0");
  auto path = dir.file("empty.ply");
  write_file(path,
             "ply\nformat ascii 1.0\nelement vertex 0\n"
             "property float x\nproperty float y\nproperty float z\nend_header\n");
  REQUIRE_THROWS_AS(read_cloud(path), EmptyCloudError);
}

TEST_CASE("parse error carries the line number") {
  test::TempDir dir("plybad");
  auto path = dir.file("bad.xyz");
  write_file(path, "0 0 0\n1 oops 2\n");
  REQUIRE_THROWS_MATCHES(read_cloud(path), ParseError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring(":2:")));
}

TEST_CASE("ply with extra vertex properties picks x y z columns") {
  test::TempDir dir("plyextra");
  auto path = dir.file("rgbish.ply");
  write_file(path,
             "ply\nformat ascii 1.0\nelement vertex 2\n"
             "property float intensity\nproperty float x\nproperty float y\n"
             "property float z\nend_header\n9 0.5 0.25 0.125\n8 1 2 3\n");
  auto res = read_cloud(path);
  REQUIRE(res.cloud.size() == 2);
  CHECK(res.cloud.points[0] == Point3(0.5, 0.25, 0.125));
}

TEST_CASE("labeled write produces the v1 header and label rows") {
  test::TempDir dir("labeled1");
  LabeledCloud cloud;
  cloud.points = {Point3(1, 2, 0.05)};
  cloud.labels = {SemanticLabel::Ground};
  auto path = dir.file("one.txt");
  write_labeled(path, cloud);

  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "# greenseg-labeled v1");
  CHECK(row == "1.000000 2.000000 0.050000 0");
}

TEST_CASE("mixed four-class cloud preserves the label multiset") {
  test::TempDir dir("labeled4");
  LabeledCloud cloud;
  std::array<SemanticLabel, 4> classes = {SemanticLabel::Ground, SemanticLabel::Obstacle,
                                          SemanticLabel::Above, SemanticLabel::Noise};
  for (int i = 0; i < 8; ++i) {
    cloud.points.emplace_back(0.1 * i, -0.2 * i, 0.01 * i);
    cloud.labels.push_back(classes[static_cast<std::size_t>(i % 4)]);
  }
  auto path = dir.file("mixed.txt");
  write_labeled(path, cloud);
  LabeledCloud back = read_labeled(path);
  REQUIRE(back.size() == 8);
  std::array<int, 4> counts{};
  for (auto l : back.labels) counts[static_cast<std::size_t>(label_code(l))]++;
  CHECK(counts == std::array<int, 4>{2, 2, 2, 2});
}

TEST_CASE("round trip on a random 1000-point cloud") {
  test::TempDir dir("roundtrip");
  auto gen = test::rng(20240517);
  LabeledCloud cloud;
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_int_distribution<int> lab(0, 3);
  for (int i = 0; i < 1000; ++i) {
    cloud.points.emplace_back(u(gen), u(gen), u(gen));
    cloud.labels.push_back(label_from_code(lab(gen)));
  }
  auto path = dir.file("rand.txt");
  write_labeled(path, cloud);
  LabeledCloud back = read_labeled(path);
  REQUIRE(back.size() == cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(back.labels[i] == cloud.labels[i]);
    CHECK((back.points[i] - cloud.points[i]).cwiseAbs().maxCoeff() <= 1e-6);
  }

  // A second write of the re-read cloud is byte-identical.
  auto path2 = dir.file("rand2.txt");
  write_labeled(path2, back);
  std::ifstream a(path), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("labeled reader rejects bad label codes") {
  test::TempDir dir("labelbad");
  auto path = dir.file("bad.txt");
  write_file(path, "# greenseg-labeled v1\n0 0 0 7\n");
  REQUIRE_THROWS_AS(read_labeled(path), ParseError);
}

TEST_CASE("ply writer round trips through read_cloud") {
  test::TempDir dir("plyw");
  PointCloud cloud;
  cloud.points = {Point3(0.123456, -1.5, 2.25), Point3(0.4, 0, 0.5)};
  auto path = dir.file("two.ply");
  write_ply(path, cloud);
  auto res = read_cloud(path);
  REQUIRE(res.cloud.size() == 2);
  CHECK((res.cloud.points[0] - cloud.points[0]).norm() < 1e-6);
}
