#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "greenseg/errors.hpp"
#include "greenseg/ground_truth.hpp"
#include "greenseg/types.hpp"

namespace greenseg {

inline constexpr std::array<SemanticLabel, 4> kMetricClasses = {
    SemanticLabel::Ground, SemanticLabel::Obstacle, SemanticLabel::Above,
    SemanticLabel::Noise};

struct ClassCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct ConfusionCounts {
  std::array<ClassCounts, 4> per_class;
  std::uint64_t evaluated = 0;  // pairs with defined ground truth
};

/// One-vs-rest confusion counts over two equal-length label sequences.
/// Ground-truth Undefined entries are excluded from all computations.
inline ConfusionCounts confusion(const std::vector<SemanticLabel>& pred,
                                 const std::vector<SemanticLabel>& gt) {
  if (pred.size() != gt.size())
    throw DisjointDomains("prediction and ground truth differ in size: " +
                          std::to_string(pred.size()) + " vs " + std::to_string(gt.size()));
  ConfusionCounts out;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (gt[i] == SemanticLabel::Undefined) continue;
    ++out.evaluated;
    for (std::size_t k = 0; k < 4; ++k) {
      const bool p = pred[i] == kMetricClasses[k];
      const bool g = gt[i] == kMetricClasses[k];
      auto& c = out.per_class[k];
      if (p && g) ++c.tp;
      else if (p && !g) ++c.fp;
      else if (!p && g) ++c.fn;
      else ++c.tn;
    }
  }
  if (out.evaluated == 0)
    throw DisjointDomains("no evaluable points (all ground truth undefined)");
  return out;
}

/// Voxel-keyed variant: compares a voxelized prediction against a
/// ground-truth map over their shared keys.
inline ConfusionCounts confusion(
    const std::unordered_map<VoxelKey, SemanticLabel, VoxelKeyHash>& pred,
    const GroundTruthMap& gt) {
  std::vector<SemanticLabel> p, g;
  p.reserve(pred.size());
  g.reserve(pred.size());
  for (const auto& [key, label] : pred) {
    auto it = gt.labels.find(key);
    if (it == gt.labels.end() || it->second == SemanticLabel::Undefined) continue;
    p.push_back(label);
    g.push_back(it->second);
  }
  if (p.empty()) throw DisjointDomains("prediction and ground truth share no voxels");
  return confusion(p, g);
}

/// Adds counts elementwise (pooling frames for micro-averaged metrics).
inline void accumulate(ConfusionCounts& into, const ConfusionCounts& from) {
  for (std::size_t k = 0; k < 4; ++k) {
    into.per_class[k].tp += from.per_class[k].tp;
    into.per_class[k].fp += from.per_class[k].fp;
    into.per_class[k].fn += from.per_class[k].fn;
    into.per_class[k].tn += from.per_class[k].tn;
  }
  into.evaluated += from.evaluated;
}

/// Per-class precision/recall/F1/IoU; NaN marks an undefined metric
/// (zero denominator), excluded from means.
struct ClassMetrics {
  double precision = std::numeric_limits<double>::quiet_NaN();
  double recall = std::numeric_limits<double>::quiet_NaN();
  double f1 = std::numeric_limits<double>::quiet_NaN();
  double iou = std::numeric_limits<double>::quiet_NaN();

  double by_index(std::size_t m) const {
    switch (m) {
      case 0: return precision;
      case 1: return recall;
      case 2: return f1;
      default: return iou;
    }
  }
};

inline bool metric_defined(double v) { return std::isfinite(v); }

inline ClassMetrics class_metrics(const ClassCounts& c) {
  ClassMetrics m;
  const double tp = static_cast<double>(c.tp);
  if (c.tp + c.fp > 0) m.precision = tp / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = tp / static_cast<double>(c.tp + c.fn);
  if (2 * c.tp + c.fp + c.fn > 0)
    m.f1 = 2.0 * tp / static_cast<double>(2 * c.tp + c.fp + c.fn);
  if (c.tp + c.fp + c.fn > 0)
    m.iou = tp / static_cast<double>(c.tp + c.fp + c.fn);
  return m;
}

using PerClassMetrics = std::array<ClassMetrics, 4>;

inline PerClassMetrics class_metrics_all(const ConfusionCounts& counts) {
  PerClassMetrics out;
  for (std::size_t k = 0; k < 4; ++k) out[k] = class_metrics(counts.per_class[k]);
  return out;
}

inline constexpr std::array<const char*, 4> kMetricNames = {"precision", "recall",
                                                            "f1", "iou"};

/// Display rounding used by the summary tables: 3 decimals, truncating,
/// with a small guard so values within double rounding error of a decimal
/// stay on it.
inline double display_round3(double x) {
  if (!std::isfinite(x)) return x;
  return std::floor(x * 1000.0 + 1e-6) / 1000.0;
}

/// Comparison report between a candidate segmentation ("ours") and a
/// baseline: per-metric means over defined classes and the relative
/// improvement percentage computed from the 3-decimal display means.
struct Summary {
  PerClassMetrics ours, base;
  std::array<double, 4> mean_ours{}, mean_base{};                  // full precision
  std::array<double, 4> display_mean_ours{}, display_mean_base{};  // 3 decimals
  std::array<double, 4> improvement_pct{};                         // from display means
  std::array<int, 4> defined_ours{}, defined_base{};               // classes in each mean
};

inline std::array<double, 4> metric_means(const PerClassMetrics& pc,
                                          std::array<int, 4>* defined_counts = nullptr) {
  std::array<double, 4> means{};
  for (std::size_t m = 0; m < 4; ++m) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      double v = pc[k].by_index(m);
      if (metric_defined(v)) {
        sum += v;
        ++n;
      }
    }
    means[m] = n > 0 ? sum / static_cast<double>(n)
                     : std::numeric_limits<double>::quiet_NaN();
    if (defined_counts) (*defined_counts)[m] = n;
  }
  return means;
}

inline Summary summarize(const PerClassMetrics& ours, const PerClassMetrics& base) {
  Summary s;
  s.ours = ours;
  s.base = base;
  s.mean_ours = metric_means(ours, &s.defined_ours);
  s.mean_base = metric_means(base, &s.defined_base);
  for (std::size_t m = 0; m < 4; ++m) {
    s.display_mean_ours[m] = display_round3(s.mean_ours[m]);
    s.display_mean_base[m] = display_round3(s.mean_base[m]);
    double b = s.display_mean_base[m];
    double o = s.display_mean_ours[m];
    s.improvement_pct[m] = (std::isfinite(b) && std::isfinite(o) && b != 0.0)
                               ? (o - b) / b * 100.0
                               : std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

namespace detail {

inline std::string fmt3(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string fmt2(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

/// CSV with columns class,precision,recall,f1,iou plus a mean row.
inline void write_metrics_csv(const std::string& path, const PerClassMetrics& pc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metrics file: " + path);
  out << "class,precision,recall,f1,iou\n";
  for (std::size_t k = 0; k < 4; ++k) {
    out << label_name(kMetricClasses[k]);
    for (std::size_t m = 0; m < 4; ++m) out << "," << detail::fmt3(pc[k].by_index(m));
    out << "\n";
  }
  auto means = metric_means(pc);
  out << "mean";
  for (std::size_t m = 0; m < 4; ++m) out << "," << detail::fmt3(display_round3(means[m]));
  out << "\n";
  if (!out) throw IoError("write failed: " + path);
}

/// As write_metrics_csv, with an improvement_pct row versus the baseline.
inline void write_summary_csv(const std::string& path, const Summary& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metrics file: " + path);
  out << "class,precision,recall,f1,iou\n";
  for (std::size_t k = 0; k < 4; ++k) {
    out << label_name(kMetricClasses[k]);
    for (std::size_t m = 0; m < 4; ++m) out << "," << detail::fmt3(s.ours[k].by_index(m));
    out << "\n";
  }
  out << "mean";
  for (std::size_t m = 0; m < 4; ++m) out << "," << detail::fmt3(s.display_mean_ours[m]);
  out << "\n";
  out << "improvement_pct";
  for (std::size_t m = 0; m < 4; ++m) out << "," << detail::fmt2(s.improvement_pct[m]);
  out << "\n";
  if (!out) throw IoError("write failed: " + path);
}

/// Aligned text table in the base-vs-ours layout used by the benchmark.
inline std::string format_summary_table(const Summary& s, const std::string& title) {
  std::string out;
  char line[160];
  out += title + "\n";
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s %8s %8s %8s %8s\n", "class",
                "P_base", "P_ours", "R_base", "R_ours", "F1_base", "F1_ours",
                "IoU_base", "IoU_ours");
  out += line;
  for (std::size_t k = 0; k < 4; ++k) {
    std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s %8s %8s %8s %8s\n",
                  label_name(kMetricClasses[k]),
                  detail::fmt3(s.base[k].precision).c_str(), detail::fmt3(s.ours[k].precision).c_str(),
                  detail::fmt3(s.base[k].recall).c_str(), detail::fmt3(s.ours[k].recall).c_str(),
                  detail::fmt3(s.base[k].f1).c_str(), detail::fmt3(s.ours[k].f1).c_str(),
                  detail::fmt3(s.base[k].iou).c_str(), detail::fmt3(s.ours[k].iou).c_str());
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s %8s %8s %8s %8s\n", "mean",
                detail::fmt3(s.display_mean_base[0]).c_str(), detail::fmt3(s.display_mean_ours[0]).c_str(),
                detail::fmt3(s.display_mean_base[1]).c_str(), detail::fmt3(s.display_mean_ours[1]).c_str(),
                detail::fmt3(s.display_mean_base[2]).c_str(), detail::fmt3(s.display_mean_ours[2]).c_str(),
                detail::fmt3(s.display_mean_base[3]).c_str(), detail::fmt3(s.display_mean_ours[3]).c_str());
  out += line;
  std::snprintf(line, sizeof(line),
                "improvement%%   P %+.2f   R %+.2f   F1 %+.2f   IoU %+.2f\n",
                s.improvement_pct[0], s.improvement_pct[1], s.improvement_pct[2],
                s.improvement_pct[3]);
  out += line;
  return out;
}

}  // namespace greenseg
