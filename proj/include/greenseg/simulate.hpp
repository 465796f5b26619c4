#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "greenseg/errors.hpp"
#include "greenseg/types.hpp"

namespace greenseg {

enum class Scenario { CentralCorridor, CropRows, EndTurn, CorridorChange };
enum class SolarProfile { S1, S2, S3, S4 };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::CentralCorridor: return "central_corridor";
    case Scenario::CropRows: return "crop_rows";
    case Scenario::EndTurn: return "end_turn";
    case Scenario::CorridorChange: return "corridor_change";
  }
  return "unknown";
}

inline Scenario scenario_from_string(const std::string& s) {
  if (s == "central_corridor") return Scenario::CentralCorridor;
  if (s == "crop_rows") return Scenario::CropRows;
  if (s == "end_turn") return Scenario::EndTurn;
  if (s == "corridor_change") return Scenario::CorridorChange;
  throw ConfigError("unknown scenario '" + s + "'");
}

inline const char* solar_name(SolarProfile s) {
  switch (s) {
    case SolarProfile::S1: return "s1";
    case SolarProfile::S2: return "s2";
    case SolarProfile::S3: return "s3";
    case SolarProfile::S4: return "s4";
  }
  return "unknown";
}

inline SolarProfile solar_from_string(const std::string& s) {
  if (s == "s1") return SolarProfile::S1;
  if (s == "s2") return SolarProfile::S2;
  if (s == "s3") return SolarProfile::S3;
  if (s == "s4") return SolarProfile::S4;
  throw ConfigError("unknown solar profile '" + s + "'");
}

/// Ghost-point fraction of the frame budget per solar profile. Profiles
/// order the severity of polyethylene-cover artifacts; the magnitudes are
/// generator constants, monotone in profile index.
inline double ghost_fraction(SolarProfile s) {
  switch (s) {
    case SolarProfile::S1: return 0.010;
    case SolarProfile::S2: return 0.020;
    case SolarProfile::S3: return 0.035;
    case SolarProfile::S4: return 0.050;
  }
  return 0.0;
}

/// Fraction of floor returns lost to glare saturation, monotone in profile.
inline double dropout_fraction(SolarProfile s) {
  switch (s) {
    case SolarProfile::S1: return 0.00;
    case SolarProfile::S2: return 0.02;
    case SolarProfile::S3: return 0.05;
    case SolarProfile::S4: return 0.08;
  }
  return 0.0;
}

/// Surface roughness (meters, 1 sigma) per floor material. Generator
/// constants, not field-measured values. Gravel and tilled soil exceed what
/// the default curvature threshold tolerates at the default neighborhood
/// radius; the stock scenarios keep floors on concrete or compacted sand.
struct MaterialTable {
  double concrete = 0.002;
  double compacted_sand = 0.004;
  double gravel = 0.008;
  double tilled_soil = 0.015;
};

struct ScenePreset {
  Scenario scenario = Scenario::CentralCorridor;
  SolarProfile solar = SolarProfile::S1;
  double slope_pct = 1.0;  // floor gradient along +x, percent
  MaterialTable materials;
  std::uint64_t rng_seed = 0;
  int n_points = 10000;
};

/// One synthetic frame: cloud in the base frame, analytic per-point truth,
/// the indices of injected ghost points, and the exact floor plane.
struct SceneFrame {
  PointCloud cloud;
  std::vector<SemanticLabel> true_labels;
  std::vector<int> artifact_index;
  Plane true_plane;
};

namespace sim_detail {

// Scene truth constants mirror the published parameter defaults.
inline constexpr double kRobotHeight = 0.5;
inline constexpr double kSceneX0 = 0.30;
inline constexpr double kGhostDetachment = 0.21;  // lateral gap floor->ghost
inline constexpr double kWallTop = 1.8;
inline constexpr double kCanopyLo = 1.6;
inline constexpr double kCanopyHi = 2.2;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t frame, std::uint64_t salt) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(frame ^ splitmix64(salt))));
}

struct Disk {
  double x = 0, y = 0, r = 0;
  bool contains(double px, double py) const {
    double dx = px - x, dy = py - y;
    return dx * dx + dy * dy <= r * r;
  }
};

struct BoxSpec {
  double cx = 0, cy = 0;
  double sx = 0.2, sy = 0.2, h = 0.3;
};

struct Rect {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

/// Frame-independent scene layout derived from the preset seed.
struct Layout {
  double slope = 0.0;
  double width = 1.0;
  double x1 = 0.88;
  Rect main;
  std::vector<Rect> extra_floor;  // end-turn opening, corridor-change wing
  Disk ghost_hole;
  double ghost_disk_r = 0.0;
  double ghost_depth = 0.06;
  int ghost_count = 0;
  std::vector<Disk> dropout_holes;
  std::vector<BoxSpec> boxes;
  std::vector<Point3> leaf_centers;
  bool head_wall = false;
  double head_wall_halfwidth = 0.5;
  double wall_gap_x0 = 0.0, wall_gap_x1 = 0.0;  // +y wall doorway (wing)
  // budgets
  int n_floor = 0, n_wall = 0, n_canopy = 0, n_clutter = 0;

  bool in_floor_region(double x, double y) const {
    if (x >= main.x0 && x <= main.x1 && y >= main.y0 && y <= main.y1) return true;
    for (const auto& r : extra_floor)
      if (x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1) return true;
    return false;
  }

  bool in_hole(double x, double y) const {
    if (ghost_hole.contains(x, y)) return true;
    for (const auto& d : dropout_holes)
      if (d.contains(x, y)) return true;
    return false;
  }

  double floor_sigma(const MaterialTable& m, Scenario sc, double x, double y) const {
    switch (sc) {
      case Scenario::CentralCorridor:
      case Scenario::EndTurn:
        return m.concrete;
      case Scenario::CropRows:
        return m.compacted_sand;
      case Scenario::CorridorChange:
        if (y > main.y1) return m.compacted_sand;  // wing
        if (x >= 0.5 && x < 0.65) return m.compacted_sand;
        return m.concrete;
    }
    return m.concrete;
  }
};

inline Layout make_layout(const ScenePreset& preset) {
  auto rng = make_rng(preset.rng_seed, 0, /*salt=*/1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  Layout lay;
  lay.slope = preset.slope_pct / 100.0;

  const double target_area = 0.58;
  switch (preset.scenario) {
    case Scenario::CentralCorridor:
      lay.width = 1.0;
      lay.x1 = kSceneX0 + target_area / lay.width;
      lay.main = {kSceneX0, lay.x1, -lay.width / 2, lay.width / 2};
      break;
    case Scenario::CropRows:
      lay.width = 0.9 + 0.2 * u01(rng);  // paper aisle regime 0.9 - 1.1 m
      lay.x1 = kSceneX0 + target_area / lay.width;
      lay.main = {kSceneX0, lay.x1, -lay.width / 2, lay.width / 2};
      break;
    case Scenario::EndTurn: {
      lay.width = 1.0;
      double corridor_len = 0.35;
      lay.x1 = kSceneX0 + corridor_len + (target_area - corridor_len * lay.width) / 1.7;
      lay.main = {kSceneX0, kSceneX0 + corridor_len, -0.5, 0.5};
      lay.extra_floor.push_back({kSceneX0 + corridor_len, lay.x1, -0.85, 0.85});
      lay.head_wall = true;
      lay.head_wall_halfwidth = 0.85;
      break;
    }
    case Scenario::CorridorChange: {
      lay.width = 1.0;
      lay.x1 = kSceneX0 + 0.48;
      lay.main = {kSceneX0, lay.x1, -0.5, 0.5};
      lay.extra_floor.push_back({0.45, 0.85, 0.5, 0.75});  // wing into next aisle
      lay.x1 = std::max(lay.x1, 0.85);
      lay.wall_gap_x0 = 0.45;
      lay.wall_gap_x1 = 0.85;
      break;
    }
  }

  const int n = preset.n_points;
  lay.ghost_count = static_cast<int>(std::lround(ghost_fraction(preset.solar) * n));
  const int rest = n - lay.ghost_count;
  lay.n_floor = static_cast<int>(std::lround(0.68 * rest));
  lay.n_wall = static_cast<int>(std::lround(0.22 * rest));
  lay.n_canopy = static_cast<int>(std::lround(0.07 * rest));
  lay.n_clutter = rest - lay.n_floor - lay.n_wall - lay.n_canopy;

  const double nominal_density = lay.n_floor / target_area;

  if (lay.ghost_count > 0) {
    lay.ghost_disk_r = std::sqrt(lay.ghost_count / nominal_density / M_PI);
    double xc = 0.55 + 0.07 * u01(rng);
    lay.ghost_hole = {xc, 0.0, lay.ghost_disk_r + kGhostDetachment};
    lay.ghost_depth = 0.04 + 0.045 * u01(rng);  // band 0.03 - 0.10 with jitter margin
  }

  double drop_frac = dropout_fraction(preset.solar);
  if (drop_frac > 0.0) {
    double per_hole = drop_frac * lay.n_floor / 2.0;
    double rd = std::sqrt(per_hole / nominal_density / M_PI);
    double span = lay.main.x1 - lay.main.x0;
    lay.dropout_holes.push_back({lay.main.x0 + 0.70 * span, 0.27 * lay.width, rd});
    lay.dropout_holes.push_back({lay.main.x0 + 0.85 * span, -0.27 * lay.width, rd});
  }

  auto place_boxes = [&](int count) {
    for (int b = 0; b < count; ++b) {
      for (int attempt = 0; attempt < 30; ++attempt) {
        double cx = lay.main.x0 + 0.15 + (lay.main.x1 - lay.main.x0 - 0.3) * u01(rng);
        double cy = (u01(rng) < 0.5 ? -1.0 : 1.0) * (0.15 + 0.15 * u01(rng));
        if (lay.ghost_count > 0) {
          double dx = cx - lay.ghost_hole.x, dy = cy - lay.ghost_hole.y;
          if (std::sqrt(dx * dx + dy * dy) < lay.ghost_hole.r + 0.25) continue;
        }
        lay.boxes.push_back({cx, cy, 0.2, 0.2, 0.3});
        break;
      }
    }
  };
  if (preset.scenario == Scenario::CentralCorridor) place_boxes(2);
  if (preset.scenario == Scenario::CorridorChange) place_boxes(1);

  if (preset.scenario == Scenario::CropRows) {
    for (int i = 0; i < 6; ++i) {
      double lx = lay.main.x0 + 0.08 + (lay.main.x1 - lay.main.x0 - 0.16) * u01(rng);
      double ly = (i % 2 == 0 ? 1.0 : -1.0) * (lay.width / 2 - 0.07);
      double lz = 0.18 + 0.25 * u01(rng);
      lay.leaf_centers.emplace_back(lx, ly, lz);
    }
  }
  return lay;
}

}  // namespace sim_detail

/// Deterministic synthetic greenhouse frame. The floor is a tilted plane
/// with per-material roughness; crop walls, canopy, box obstacles and leaf
/// clutter fill the scene; the solar profile injects mirrored ghost
/// clusters below the floor (detached laterally from any surviving floor
/// return) and glare dropout holes. Truth labels come from construction.
inline SceneFrame generate_frame(const ScenePreset& preset, int frame_index) {
  using namespace sim_detail;
  const Layout lay = make_layout(preset);
  auto rng = make_rng(preset.rng_seed, static_cast<std::uint64_t>(frame_index) + 1, 2);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SceneFrame frame;
  frame.cloud.frame_id = "base_link";
  frame.cloud.stamp = 0.1 * frame_index;
  const double m = lay.slope;
  frame.true_plane.normal = Point3(-m, 0.0, 1.0).normalized();
  frame.true_plane.offset = 0.0;
  frame.true_plane = frame.true_plane.canonicalized();

  auto push = [&](const Point3& p, SemanticLabel l) {
    frame.cloud.points.push_back(p);
    frame.true_labels.push_back(l);
  };
  auto floor_z = [&](double x) { return m * x; };
  auto height_label = [&](const Point3& p) {
    return (p.z() - floor_z(p.x())) <= kRobotHeight ? SemanticLabel::Obstacle
                                                    : SemanticLabel::Above;
  };

  // Floor: uniform over the floor region minus holes, with a denser band at
  // the near edge (the camera's near field) so the minimum-radius rim keeps
  // full neighborhoods.
  const double total_area =
      lay.main.area() + [&] {
        double a = 0.0;
        for (const auto& r : lay.extra_floor) a += r.area();
        return a;
      }();
  auto sample_floor_xy = [&](bool boost) {
    for (int tries = 0; tries < 4000; ++tries) {
      double x, y;
      if (boost) {
        x = lay.main.x0 + 0.1 * u01(rng);
        y = lay.main.y0 + lay.width * u01(rng);
      } else {
        double pick = u01(rng) * total_area;
        const Rect* r = &lay.main;
        double acc = lay.main.area();
        for (const auto& e : lay.extra_floor) {
          if (pick < acc) break;
          acc += e.area();
          r = &e;
        }
        x = r->x0 + (r->x1 - r->x0) * u01(rng);
        y = r->y0 + (r->y1 - r->y0) * u01(rng);
      }
      if (!lay.in_floor_region(x, y) || lay.in_hole(x, y)) continue;
      return std::pair<double, double>{x, y};
    }
    return std::pair<double, double>{lay.main.x1, lay.main.y1};  // unreachable
  };
  const int n_boost = static_cast<int>(std::lround(0.18 * lay.n_floor));
  for (int i = 0; i < lay.n_floor; ++i) {
    auto [x, y] = sample_floor_xy(i < n_boost);
    double sigma = lay.floor_sigma(preset.materials, preset.scenario, x, y);
    double jx = std::clamp(gauss(rng) * sigma, -0.02, 0.02);
    double jy = std::clamp(gauss(rng) * sigma, -0.02, 0.02);
    double jz = std::clamp(gauss(rng) * sigma, -0.02, 0.02);
    push(Point3(x + jx, y + jy, floor_z(x) + jz), SemanticLabel::Ground);
  }

  // Crop walls along both aisle sides, plus the head wall where present.
  auto sample_wall = [&](int count) {
    for (int i = 0; i < count; ++i) {
      double z = 0.02 + (kWallTop - 0.02) * u01(rng);
      Point3 p;
      double pick = u01(rng);
      if (lay.head_wall && pick < 0.25) {
        double y = -lay.head_wall_halfwidth + 2 * lay.head_wall_halfwidth * u01(rng);
        p = Point3(lay.x1 + 0.01 * gauss(rng), y, z);
      } else {
        double x = lay.main.x0 + (lay.x1 - lay.main.x0) * u01(rng);
        bool left = u01(rng) < 0.5;
        double ywall = left ? lay.main.y0 : lay.main.y1;
        if (!left && lay.wall_gap_x1 > lay.wall_gap_x0 && x > lay.wall_gap_x0 &&
            x < lay.wall_gap_x1)
          ywall = 0.75;  // doorway: the wall continues on the wing's far side
        p = Point3(x, ywall + 0.015 * gauss(rng), z);
      }
      push(p, height_label(p));
    }
  };
  sample_wall(lay.n_wall);

  // Overhead canopy / roof structure.
  for (int i = 0; i < lay.n_canopy; ++i) {
    double x = lay.main.x0 + (lay.x1 - lay.main.x0) * u01(rng);
    double y = lay.main.y0 + lay.width * u01(rng);
    double z = kCanopyLo + (kCanopyHi - kCanopyLo) * u01(rng);
    Point3 p(x, y, z + 0.02 * gauss(rng));
    push(p, SemanticLabel::Above);
  }

  // Clutter: box obstacles or leaf blobs depending on the scenario.
  if (!lay.boxes.empty()) {
    int per_box = lay.n_clutter / static_cast<int>(lay.boxes.size());
    for (const auto& box : lay.boxes) {
      for (int i = 0; i < per_box; ++i) {
        double pick = u01(rng);
        Point3 p;
        if (pick < 0.4) {  // top face
          p = Point3(box.cx + (u01(rng) - 0.5) * box.sx,
                     box.cy + (u01(rng) - 0.5) * box.sy,
                     floor_z(box.cx) + box.h + 0.003 * gauss(rng));
        } else {  // side faces
          double z = floor_z(box.cx) + box.h * u01(rng);
          if (u01(rng) < 0.5) {
            double sx = u01(rng) < 0.5 ? -0.5 : 0.5;
            p = Point3(box.cx + sx * box.sx, box.cy + (u01(rng) - 0.5) * box.sy, z);
          } else {
            double sy = u01(rng) < 0.5 ? -0.5 : 0.5;
            p = Point3(box.cx + (u01(rng) - 0.5) * box.sx, box.cy + sy * box.sy, z);
          }
          p += Point3(0.002 * gauss(rng), 0.002 * gauss(rng), 0.002 * gauss(rng));
        }
        push(p, SemanticLabel::Obstacle);
      }
    }
  } else if (!lay.leaf_centers.empty()) {
    int per_leaf = lay.n_clutter / static_cast<int>(lay.leaf_centers.size());
    for (const auto& c : lay.leaf_centers) {
      for (int i = 0; i < per_leaf; ++i) {
        Point3 p = c + 0.03 * Point3(gauss(rng), gauss(rng), gauss(rng));
        p.z() = std::clamp(p.z(), 0.15, kRobotHeight - 0.02);
        push(p, SemanticLabel::Obstacle);
      }
    }
  }

  // Ghost cluster: a mirrored copy of the missing floor patch, 0.03-0.10 m
  // below the true surface, laterally detached from every surviving floor
  // return by at least the hole margin.
  if (lay.ghost_count > 0) {
    for (int i = 0; i < lay.ghost_count; ++i) {
      double ang = 2.0 * M_PI * u01(rng);
      double rad = lay.ghost_disk_r * std::sqrt(u01(rng));
      double x = lay.ghost_hole.x + rad * std::cos(ang);
      double y = lay.ghost_hole.y + rad * std::sin(ang);
      double depth = lay.ghost_depth + std::clamp(0.002 * gauss(rng), -0.006, 0.006);
      frame.artifact_index.push_back(static_cast<int>(frame.cloud.points.size()));
      push(Point3(x, y, floor_z(x) - depth), SemanticLabel::Noise);
    }
  }

  return frame;
}

/// Frames share the layout; each frame resamples every surface with its own
/// noise stream. static_pose repeats frame 0 bit-identically, the mode used
/// by the ground-truth accumulator protocol.
inline std::vector<SceneFrame> generate_sequence(const ScenePreset& preset, int n_frames,
                                                 bool static_pose = false) {
  std::vector<SceneFrame> out;
  out.reserve(static_cast<std::size_t>(n_frames));
  for (int f = 0; f < n_frames; ++f) {
    out.push_back(generate_frame(preset, static_pose ? 0 : f));
    if (static_pose) {
      out.back().cloud.stamp = 0.1 * f;
    }
  }
  return out;
}

}  // namespace greenseg
