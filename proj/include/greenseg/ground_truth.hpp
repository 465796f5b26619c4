#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "greenseg/errors.hpp"
#include "greenseg/types.hpp"

namespace greenseg {

/// Integer voxel coordinate: floor(p / resolution) componentwise.
struct VoxelKey {
  int ix = 0, iy = 0, iz = 0;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = static_cast<std::uint32_t>(k.ix) * 73856093ull;
    h ^= static_cast<std::uint32_t>(k.iy) * 19349663ull;
    h ^= static_cast<std::uint32_t>(k.iz) * 83492791ull;
    return static_cast<std::size_t>(h);
  }
};

inline VoxelKey voxel_key(const Point3& p, double resolution) {
  return {static_cast<int>(std::floor(p.x() / resolution)),
          static_cast<int>(std::floor(p.y() / resolution)),
          static_cast<int>(std::floor(p.z() / resolution))};
}

/// Point-majority label per occupied voxel; ties vote Undefined.
inline std::unordered_map<VoxelKey, SemanticLabel, VoxelKeyHash> voxelize_labels(
    const LabeledCloud& cloud, double resolution) {
  std::unordered_map<VoxelKey, std::array<std::uint32_t, 5>, VoxelKeyHash> counts;
  auto slot = [](SemanticLabel l) {
    return l == SemanticLabel::Undefined ? 4u : static_cast<unsigned>(label_code(l));
  };
  for (std::size_t i = 0; i < cloud.points.size(); ++i)
    counts[voxel_key(cloud.points[i], resolution)][slot(cloud.labels[i])]++;

  std::unordered_map<VoxelKey, SemanticLabel, VoxelKeyHash> out;
  out.reserve(counts.size());
  for (const auto& [key, c] : counts) {
    unsigned best = 0;
    bool tie = false;
    for (unsigned s = 1; s < 5; ++s) {
      if (c[s] > c[best]) { best = s; tie = false; }
      else if (c[s] == c[best] && c[s] > 0) tie = true;
    }
    SemanticLabel vote = tie ? SemanticLabel::Undefined
                             : (best == 4u ? SemanticLabel::Undefined
                                           : label_from_code(static_cast<int>(best)));
    out.emplace(key, vote);
  }
  return out;
}

/// Sliding-window accumulator of per-frame voxel label votes (at most W
/// retained per voxel, oldest evicted first).
class GtAccumulator {
 public:
  GtAccumulator(double resolution, int window)
      : resolution_(resolution), window_(window) {}

  void accumulate_frame(const LabeledCloud& labeled) {
    auto votes = voxelize_labels(labeled, resolution_);
    for (const auto& [key, vote] : votes) {
      auto& buf = votes_[key];
      buf.push_back(vote);
      if (static_cast<int>(buf.size()) > window_) buf.pop_front();
    }
    ++frames_seen_;
  }

  double resolution() const { return resolution_; }
  int window() const { return window_; }
  int frames_seen() const { return frames_seen_; }
  const std::unordered_map<VoxelKey, std::deque<SemanticLabel>, VoxelKeyHash>& votes() const {
    return votes_;
  }

 private:
  double resolution_;
  int window_;
  int frames_seen_ = 0;
  std::unordered_map<VoxelKey, std::deque<SemanticLabel>, VoxelKeyHash> votes_;
};

/// Voxel map of temporally consistent labels. Undefined entries are kept in
/// the map but excluded from all metric computations.
struct GroundTruthMap {
  double resolution = 0.05;
  int window = 10;
  double psi_min = 0.9;
  std::unordered_map<VoxelKey, SemanticLabel, VoxelKeyHash> labels;
};

/// A voxel receives label L iff L holds at least psi_min of its votes;
/// voxels observed in fewer than W frames stay Undefined (conservative).
/// The 9/10 boundary at psi_min = 0.9 is inclusive.
inline GroundTruthMap extract_ground_truth(const GtAccumulator& acc, double psi_min) {
  GroundTruthMap map;
  map.resolution = acc.resolution();
  map.window = acc.window();
  map.psi_min = psi_min;
  for (const auto& [key, votes] : acc.votes()) {
    if (static_cast<int>(votes.size()) < acc.window()) {
      map.labels.emplace(key, SemanticLabel::Undefined);
      continue;
    }
    std::array<std::uint32_t, 5> counts{};
    auto slot = [](SemanticLabel l) {
      return l == SemanticLabel::Undefined ? 4u : static_cast<unsigned>(label_code(l));
    };
    for (SemanticLabel v : votes) counts[slot(v)]++;
    unsigned best = 0;
    for (unsigned s = 1; s < 5; ++s)
      if (counts[s] > counts[best]) best = s;
    double ratio = static_cast<double>(counts[best]) / static_cast<double>(votes.size());
    SemanticLabel winner = best == 4u ? SemanticLabel::Undefined
                                      : label_from_code(static_cast<int>(best));
    map.labels.emplace(key, ratio >= psi_min ? winner : SemanticLabel::Undefined);
  }
  return map;
}

inline constexpr const char* kGtHeader = "# greenseg-gt v1";

inline void write_ground_truth(const std::string& path, const GroundTruthMap& map) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write ground-truth file: " + path);
  out << kGtHeader << "\n";
  out << "# resolution " << map.resolution << "\n";
  out << "# window " << map.window << "\n";
  out << "# psi_min " << map.psi_min << "\n";
  for (const auto& [key, label] : map.labels)
    out << key.ix << " " << key.iy << " " << key.iz << " " << label_code(label) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

inline GroundTruthMap read_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ground-truth file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.find(kGtHeader) != 0)
    throw ParseError(path, 1, std::string("expected header '") + kGtHeader + "'");
  GroundTruthMap map;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      if (key == "resolution") ss >> map.resolution;
      else if (key == "window") ss >> map.window;
      else if (key == "psi_min") ss >> map.psi_min;
      continue;
    }
    std::istringstream ss(line);
    VoxelKey key;
    int code;
    if (!(ss >> key.ix >> key.iy >> key.iz >> code) || !is_valid_label_code(code))
      throw ParseError(path, line_no, "expected 'ix iy iz label_code'");
    map.labels.emplace(key, label_from_code(code));
  }
  return map;
}

}  // namespace greenseg
