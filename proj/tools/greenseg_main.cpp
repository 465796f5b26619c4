// Command-line front end: segment, evaluate, simulate, bench.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "greenseg/greenseg.hpp"

namespace fs = std::filesystem;
using namespace greenseg;

namespace {

constexpr int kExitUsage = 2;      // parse/config errors
constexpr int kExitNoPlane = 3;    // PlaneNotFound on every frame

std::string obstacle_path(const std::string& out) {
  fs::path p(out);
  fs::path stem = p.stem();
  fs::path ext = p.extension();
  return (p.parent_path() / (stem.string() + ".obstacle" + ext.string())).string();
}

void print_label_counts(const LabeledCloud& labeled) {
  std::size_t counts[4] = {0, 0, 0, 0};
  for (auto l : labeled.labels) counts[static_cast<std::size_t>(label_code(l))]++;
  std::printf("labels: ground %zu, obstacle %zu, above %zu, noise %zu (total %zu)\n",
              counts[0], counts[1], counts[2], counts[3], labeled.size());
}

SegParams load_params_or_default(const std::string& path) {
  if (path.empty()) return validate_params(SegParams{});
  return load_params(path);
}

RigidTransform load_tf_or_identity(const std::string& path) {
  if (path.empty()) return RigidTransform::identity();
  return load_transform_table(path).lookup();
}

int cmd_segment(const std::string& algo, const std::string& cloud_path,
                const std::string& tf_path, const std::string& params_path,
                const std::string& out_path) {
  SegParams params = load_params_or_default(params_path);
  RigidTransform tf = load_tf_or_identity(tf_path);
  auto read = read_cloud(cloud_path);
  if (read.dropped_non_finite > 0)
    std::fprintf(stderr, "warning: dropped %zu non-finite points from %s\n",
                 read.dropped_non_finite, cloud_path.c_str());

  SegmentationResult result = algo == "baseline"
                                  ? baseline_segment(read.cloud, tf, params)
                                  : greenseg_segment(read.cloud, tf, params);
  write_labeled(out_path, result.labeled);
  LabeledCloud obstacle_labeled;
  obstacle_labeled.points = result.obstacles.points;
  obstacle_labeled.labels.assign(result.obstacles.size(), SemanticLabel::Obstacle);
  obstacle_labeled.frame_id = result.obstacles.frame_id;
  write_labeled(obstacle_path(out_path), obstacle_labeled);
  print_label_counts(result.labeled);
  if (!result.fit) {
    std::fprintf(stderr, "no ground plane found; frame labeled all-noise\n");
    return kExitNoPlane;
  }
  return 0;
}

bool file_has_header(const std::string& path, const std::string& header) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line.find(header) == 0;
}

PerClassMetrics evaluate_pair(const LabeledCloud& pred, const std::string& gt_path) {
  if (file_has_header(gt_path, kGtHeader)) {
    GroundTruthMap gt = read_ground_truth(gt_path);
    auto voxels = voxelize_labels(pred, gt.resolution);
    return class_metrics_all(confusion(voxels, gt));
  }
  LabeledCloud truth = read_labeled(gt_path);
  return class_metrics_all(confusion(pred.labels, truth.labels));
}

int cmd_evaluate(const std::string& pred_path, const std::string& gt_path,
                 const std::string& baseline_path, const std::string& out_path) {
  LabeledCloud pred = read_labeled(pred_path);
  PerClassMetrics ours = evaluate_pair(pred, gt_path);
  if (baseline_path.empty()) {
    write_metrics_csv(out_path, ours);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
  }
  LabeledCloud base_pred = read_labeled(baseline_path);
  PerClassMetrics base = evaluate_pair(base_pred, gt_path);
  Summary summary = summarize(ours, base);
  write_summary_csv(out_path, summary);
  std::fputs(format_summary_table(summary, "evaluation vs baseline").c_str(), stdout);
  return 0;
}

int cmd_simulate(const std::string& preset_name, const std::string& solar,
                 int frames, std::uint64_t seed, double slope_pct, int n_points,
                 const std::string& out_dir) {
  ScenePreset preset;
  preset.scenario = scenario_from_string(preset_name);
  preset.solar = solar_from_string(solar);
  preset.rng_seed = seed;
  preset.slope_pct = slope_pct;
  preset.n_points = n_points;
  fs::create_directories(out_dir);
  auto sequence = generate_sequence(preset, frames);
  for (int f = 0; f < frames; ++f) {
    char name[64];
    std::snprintf(name, sizeof(name), "frame_%03d", f);
    const auto& frame = sequence[static_cast<std::size_t>(f)];
    write_ply((fs::path(out_dir) / (std::string(name) + ".ply")).string(), frame.cloud);
    LabeledCloud truth;
    truth.points = frame.cloud.points;
    truth.labels = frame.true_labels;
    write_labeled((fs::path(out_dir) / (std::string(name) + ".truth.txt")).string(), truth);
  }
  std::printf("wrote %d frame(s) to %s\n", frames, out_dir.c_str());
  return 0;
}

struct BenchTiming {
  double base_ms = 0.0;
  double green_ms = 0.0;
  std::size_t frames = 0;
  std::size_t points = 0;
};

int cmd_bench(const std::string& preset_name, const std::string& solar_name_arg,
              int frames, int seeds, int n_points, const std::string& params_path,
              const std::string& out_dir) {
  SegParams params = load_params_or_default(params_path);
  fs::create_directories(out_dir);

  std::vector<Scenario> scenarios;
  if (preset_name == "all")
    scenarios = {Scenario::CentralCorridor, Scenario::CropRows, Scenario::EndTurn,
                 Scenario::CorridorChange};
  else
    scenarios = {scenario_from_string(preset_name)};
  std::vector<SolarProfile> solars;
  if (solar_name_arg == "all")
    solars = {SolarProfile::S1, SolarProfile::S2, SolarProfile::S3, SolarProfile::S4};
  else
    solars = {solar_from_string(solar_name_arg)};

  std::ofstream summary_csv(fs::path(out_dir) / "summary.csv");
  summary_csv << "scenario,solar,mean_iou_base,mean_iou_greenseg,improvement_iou_pct,"
                 "mean_recall_base,mean_recall_greenseg,improvement_recall_pct,"
                 "ms_per_frame_greenseg,frames_per_sec,points_per_sec\n";

  for (Scenario scenario : scenarios) {
    for (SolarProfile solar : solars) {
      ConfusionCounts pooled_base, pooled_green;
      // macro accumulators: per class x metric sums over frames where defined
      std::array<std::array<double, 4>, 4> macro_sum_base{}, macro_sum_green{};
      std::array<std::array<int, 4>, 4> macro_n_base{}, macro_n_green{};
      BenchTiming timing;

      for (int seed = 0; seed < seeds; ++seed) {
        ScenePreset preset;
        preset.scenario = scenario;
        preset.solar = solar;
        preset.rng_seed = static_cast<std::uint64_t>(seed) + 1;
        preset.n_points = n_points;
        for (int f = 0; f < frames; ++f) {
          SceneFrame frame = generate_frame(preset, f);
          auto t0 = std::chrono::steady_clock::now();
          auto base = baseline_segment(frame.cloud, RigidTransform::identity(), params);
          auto t1 = std::chrono::steady_clock::now();
          auto green = greenseg_segment(frame.cloud, RigidTransform::identity(), params);
          auto t2 = std::chrono::steady_clock::now();
          timing.base_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
          timing.green_ms += std::chrono::duration<double, std::milli>(t2 - t1).count();
          timing.frames += 1;
          timing.points += frame.cloud.size();

          std::vector<SemanticLabel> truth;
          truth.reserve(base.labeled.size());
          for (int idx : base.valid_indices)
            truth.push_back(frame.true_labels[static_cast<std::size_t>(idx)]);
          auto cb = confusion(base.labeled.labels, truth);
          auto cg = confusion(green.labeled.labels, truth);
          accumulate(pooled_base, cb);
          accumulate(pooled_green, cg);
          auto mb = class_metrics_all(cb);
          auto mg = class_metrics_all(cg);
          for (std::size_t k = 0; k < 4; ++k)
            for (std::size_t m = 0; m < 4; ++m) {
              if (metric_defined(mb[k].by_index(m))) {
                macro_sum_base[k][m] += mb[k].by_index(m);
                macro_n_base[k][m] += 1;
              }
              if (metric_defined(mg[k].by_index(m))) {
                macro_sum_green[k][m] += mg[k].by_index(m);
                macro_n_green[k][m] += 1;
              }
            }
        }
      }

      std::string tag =
          std::string(scenario_name(scenario)) + "_" + solar_name(solar);
      Summary micro = summarize(class_metrics_all(pooled_green),
                                class_metrics_all(pooled_base));
      write_summary_csv((fs::path(out_dir) / (tag + "_micro.csv")).string(), micro);

      auto macro_metrics = [](const std::array<std::array<double, 4>, 4>& sum,
                              const std::array<std::array<int, 4>, 4>& n) {
        PerClassMetrics pc;
        for (std::size_t k = 0; k < 4; ++k) {
          auto get = [&](std::size_t m) {
            return n[k][m] > 0 ? sum[k][m] / n[k][m]
                               : std::numeric_limits<double>::quiet_NaN();
          };
          pc[k].precision = get(0);
          pc[k].recall = get(1);
          pc[k].f1 = get(2);
          pc[k].iou = get(3);
        }
        return pc;
      };
      Summary macro = summarize(macro_metrics(macro_sum_green, macro_n_green),
                                macro_metrics(macro_sum_base, macro_n_base));
      write_summary_csv((fs::path(out_dir) / (tag + "_macro.csv")).string(), macro);

      double ms_per_frame = timing.green_ms / static_cast<double>(timing.frames);
      double fps = 1000.0 / ms_per_frame;
      double pps = static_cast<double>(timing.points) / (timing.green_ms / 1000.0);
      std::fputs(format_summary_table(micro, tag + " (micro)").c_str(), stdout);
      std::printf("timing: baseline %.2f ms/frame, greenseg %.2f ms/frame "
                  "(%.1f frames/s, %.0f points/s)\n\n",
                  timing.base_ms / static_cast<double>(timing.frames), ms_per_frame, fps, pps);
      char row[256];
      std::snprintf(row, sizeof(row), "%s,%s,%.6f,%.6f,%.2f,%.6f,%.6f,%.2f,%.3f,%.1f,%.0f\n",
                    scenario_name(scenario), solar_name(solar), micro.mean_base[3],
                    micro.mean_ours[3], micro.improvement_pct[3], micro.mean_base[1],
                    micro.mean_ours[1], micro.improvement_pct[1], ms_per_frame, fps, pps);
      summary_csv << row;
    }
  }
  std::printf("wrote %s\n", (fs::path(out_dir) / "summary.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GreenSeg ground segmentation toolkit"};
  app.require_subcommand(1);

  // segment
  auto* segment = app.add_subcommand("segment", "segment a point cloud");
  std::string algo = "greenseg", cloud_path, tf_path, params_path, out_path;
  segment->add_option("--algo", algo, "baseline or greenseg")
      ->check(CLI::IsMember({"baseline", "greenseg"}));
  segment->add_option("--cloud", cloud_path, "input PLY or XYZ file")->required();
  segment->add_option("--tf", tf_path, "transform config file");
  segment->add_option("--params", params_path, "parameter config file");
  segment->add_option("--out", out_path, "labeled output path")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score a labeled cloud against truth");
  std::string pred_path, gt_path, baseline_path, report_path;
  evaluate->add_option("--pred", pred_path, "predicted labeled cloud")->required();
  evaluate->add_option("--gt", gt_path, "truth: labeled cloud or voxel gt file")->required();
  evaluate->add_option("--baseline", baseline_path, "baseline labeled cloud");
  evaluate->add_option("--out", report_path, "report CSV path")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate synthetic frames");
  std::string preset_name = "central_corridor", solar = "s1", sim_out;
  int frames = 1, n_points = 10000;
  std::uint64_t seed = 0;
  double slope_pct = 1.0;
  simulate->add_option("--preset", preset_name, "scenario preset")
      ->check(CLI::IsMember({"central_corridor", "crop_rows", "end_turn", "corridor_change"}));
  simulate->add_option("--solar", solar, "solar profile s1..s4")
      ->check(CLI::IsMember({"s1", "s2", "s3", "s4"}));
  simulate->add_option("--frames", frames, "number of frames");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--slope", slope_pct, "floor slope percent");
  simulate->add_option("--points", n_points, "points per frame");
  simulate->add_option("--out", sim_out, "output directory")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "run both algorithms over presets");
  std::string bench_preset = "all", bench_solar = "all", bench_out, bench_params;
  int bench_frames = 2, bench_seeds = 3, bench_points = 10000;
  bench->add_option("--preset", bench_preset, "scenario preset or 'all'");
  bench->add_option("--solar", bench_solar, "solar profile or 'all'");
  bench->add_option("--frames", bench_frames, "frames per seed");
  bench->add_option("--seeds", bench_seeds, "seeds per condition");
  bench->add_option("--points", bench_points, "points per frame");
  bench->add_option("--params", bench_params, "parameter config file");
  bench->add_option("--out", bench_out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (segment->parsed())
      return cmd_segment(algo, cloud_path, tf_path, params_path, out_path);
    if (evaluate->parsed())
      return cmd_evaluate(pred_path, gt_path, baseline_path, report_path);
    if (simulate->parsed())
      return cmd_simulate(preset_name, solar, frames, seed, slope_pct, n_points, sim_out);
    if (bench->parsed())
      return cmd_bench(bench_preset, bench_solar, bench_frames, bench_seeds, bench_points,
                       bench_params, bench_out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
