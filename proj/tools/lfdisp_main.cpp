// Command-line front end: disparity estimation from 4D light fields with
// matching-entropy window selection, plus the synthetic scene generator and
// the evaluation tooling.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lfdisp/lfdisp.hpp"
#include "lfdisp/pgm.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lfdisp;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

Grid<Rgb8> region_colors(const RegionMap& regions) {
  // red = occluding, blue = occluded, yellow = texture, green = smooth
  static constexpr Rgb8 kPalette[4] = {
      {255, 0, 0}, {0, 0, 255}, {255, 230, 0}, {0, 160, 0}};
  Grid<Rgb8> img(regions.width(), regions.height());
  for (int y = 0; y < regions.height(); ++y)
    for (int x = 0; x < regions.width(); ++x)
      img.at(x, y) = kPalette[static_cast<int>(regions.at(x, y))];
  return img;
}

Image disparity_render(const DisparityMap& map, double d_min, double d_max) {
  Image img(map.width(), map.height(), 0.0f);
  const double span = (d_max > d_min) ? d_max - d_min : 1.0;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (map.valid.at(x, y))
        img.at(x, y) = static_cast<float>(
            std::clamp((map.values.at(x, y) - d_min) / span, 0.0, 1.0));
  return img;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::Occluding: return "occluding";
    case Region::Occluded: return "occluded";
    case Region::Texture: return "texture";
    case Region::Smooth: return "smooth";
  }
  return "?";
}

json region_metrics_json(const RegionMetrics& metrics) {
  json m;
  m["mse_x100"] = metrics.mse_x100;
  json bp;
  for (const auto& [t, frac] : metrics.badpix) {
    char key[16];
    std::snprintf(key, sizeof(key), "%.2f", t);
    bp[key] = frac;
  }
  m["badpix"] = bp;
  m["evaluated"] = metrics.evaluated;
  m["invalid_est"] = metrics.invalid_est;
  return m;
}

json per_region_json(const MetricsReport& report) {
  json pr = json::object();
  for (const auto& [label, metrics] : report.per_region)
    pr[region_name(label)] = region_metrics_json(metrics);
  return pr;
}

void print_metrics(const MetricsReport& report, std::ostream& out) {
  out << "mse_x100 = " << report.overall.mse_x100 << "\n";
  for (const auto& [t, frac] : report.overall.badpix)
    out << "badpix(" << t << ") = " << frac << "\n";
  out << "evaluated = " << report.overall.evaluated
      << ", invalid = " << report.overall.invalid_est << "\n";
  for (const auto& [label, m] : report.per_region)
    out << "  [" << region_name(label) << "] mse_x100 = " << m.mse_x100
        << ", badpix(0.07) = " << m.badpix.at(0.07) << ", n = " << m.evaluated
        << "\n";
}

// Options shared by every command that runs (part of) the pipeline.
struct EstimateOptions {
  std::string input, config_path, baseline = "adaptive", metric = "l1";
  std::string diff_shift = "none";
  EstimatorConfig cfg;
  TVParams tv;
  bool no_tv = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "light field directory")->required();
    cmd->add_option("--config", config_path,
                    "scene config (default <input>/parameters.cfg)");
    cmd->add_option("--baseline", baseline, "fixed|adaptive")
        ->check(CLI::IsMember({"fixed", "adaptive"}));
    cmd->add_option("--fine-step", cfg.fine_step, "fine grid step");
    cmd->add_option("--coarse-step", cfg.coarse_step, "coarse grid step");
    cmd->add_option("--flat-tol", cfg.flat_tol, "flat-curve threshold");
    cmd->add_option("--alpha1", cfg.select.alpha1,
                    "disparity-consistency weight");
    cmd->add_option("--alpha2", cfg.select.alpha2, "anti-occlusion weight");
    cmd->add_option("--lambda", cfg.lambda, "entropy weight (documentation)");
    cmd->add_option("--gray-bins", cfg.select.gray_bins,
                    "gray histogram bins");
    cmd->add_option("--layers", cfg.region.layers, "segmentation layers");
    cmd->add_option("--metric", metric, "l1|l2 matching cost")
        ->check(CLI::IsMember({"l1", "l2"}));
    cmd->add_option("--diff-shift", diff_shift,
                    "segmentation diff lookup: none|init|literal")
        ->check(CLI::IsMember({"none", "init", "literal"}));
    cmd->add_option("--gamma", tv.gamma, "TV regularization weight");
    cmd->add_option("--tv-iters", tv.max_iters, "TV iteration cap");
    cmd->add_flag("--no-tv", no_tv, "skip TV refinement");
  }

  SceneConfig load_scene() const {
    const std::string path =
        config_path.empty() ? (fs::path(input) / "parameters.cfg").string()
                            : config_path;
    return load_scene_config(path);
  }

  EstimatorConfig estimator_config() {
    cfg.adaptive = baseline != "fixed";
    cfg.match.metric = metric == "l2" ? CostMetric::L2 : CostMetric::L1;
    cfg.select.disparity_bin_width = cfg.coarse_step;
    if (diff_shift == "init")
      cfg.region.diff_shift = DiffShift::InitDisparity;
    else if (diff_shift == "literal")
      cfg.region.diff_shift = DiffShift::ViewpointUnits;
    else
      cfg.region.diff_shift = DiffShift::None;
    return cfg;
  }
};

RegionMap regions_for(const LightField& lf, const DisparityMap& init,
                      const DisparityGrid& coarse,
                      const EstimatorConfig& cfg) {
  const double valid_frac =
      double(init.valid_count()) / double(init.values.size());
  if (valid_frac >= cfg.region.min_init_valid_fraction)
    return identify_regions(lf, init, coarse, cfg.region).map;
  return classify_regions(Grid<float>(lf.width, lf.height, 0.0f),
                          central_view(lf), cfg.region.psi_radius,
                          cfg.region.intensity_tol);
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
  const SceneSpec spec = load_scene_spec(spec_path);
  const SynthResult r = render(spec);
  fs::create_directories(out_dir);

  for (size_t i = 0; i < r.lf.views.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "input_Cam%03zu.png", i);
    write_png_gray16(r.lf.views[i], (fs::path(out_dir) / name).string());
  }

  double d_min = spec.layers.front().disparity, d_max = d_min;
  for (const LayerSpec& l : spec.layers) {
    d_min = std::min(d_min, l.disparity);
    d_max = std::max(d_max, l.disparity);
  }
  SceneConfig cfg;
  cfg.disparity_min = d_min - 0.5;
  cfg.disparity_max = d_max + 0.5;
  cfg.ground_truth_path = "gt.pfm";
  write_scene_config(cfg, (fs::path(out_dir) / "parameters.cfg").string());

  write_pfm(r.gt, (fs::path(out_dir) / "gt.pfm").string());
  write_png_rgb8(region_colors(r.gt_regions),
                 (fs::path(out_dir) / "gt_regions.png").string());
  write_pgm_labels(r.gt_regions,
                   (fs::path(out_dir) / "gt_regions.pgm").string());
  std::cout << "wrote " << r.lf.views.size() << " views to " << out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light field disparity estimation by adaptive region matching"};
  app.require_subcommand(1);

  // --- synth ---
  auto* synth_cmd = app.add_subcommand("synth", "render a synthetic scene");
  std::string synth_spec, synth_out;
  synth_cmd->add_option("--spec", synth_spec, "scene description file")
      ->required();
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  // --- estimate ---
  auto* est_cmd = app.add_subcommand("estimate", "estimate a disparity map");
  EstimateOptions est_opts;
  est_opts.attach(est_cmd);
  std::string est_out, est_regions_png, est_initial, est_argmin, est_json,
      est_gt, est_viz;
  est_cmd->add_option("--out", est_out, "output disparity PFM")->required();
  est_cmd->add_option("--regions", est_regions_png, "region map PNG");
  est_cmd->add_option("--initial", est_initial, "initial disparity PFM");
  est_cmd->add_option("--argmin", est_argmin, "discrete argmin PFM");
  est_cmd->add_option("--viz", est_viz, "normalized disparity PNG");
  est_cmd->add_option("--json", est_json, "JSON report path");
  est_cmd->add_option("--gt", est_gt, "ground truth PFM for metrics");

  // --- eval ---
  auto* eval_cmd = app.add_subcommand("eval", "compare two disparity maps");
  std::string eval_est, eval_gt, eval_regions, eval_out;
  bool eval_json_flag = false;
  eval_cmd->add_option("--est", eval_est, "estimated PFM")->required();
  eval_cmd->add_option("--gt", eval_gt, "ground truth PFM")->required();
  eval_cmd->add_option("--regions", eval_regions, "label PGM for slices");
  eval_cmd->add_option("--out", eval_out, "JSON report path");
  eval_cmd->add_flag("--json", eval_json_flag, "print JSON to stdout");

  // --- regions ---
  auto* reg_cmd = app.add_subcommand("regions", "classify region types");
  EstimateOptions reg_opts;
  reg_opts.attach(reg_cmd);
  std::string reg_out, reg_pgm;
  reg_cmd->add_option("--out", reg_out, "color-coded PNG")->required();
  reg_cmd->add_option("--pgm", reg_pgm, "raw label PGM");

  // --- inspect-window ---
  auto* insp_cmd =
      app.add_subcommand("inspect-window", "entropy table for one anchor");
  EstimateOptions insp_opts;
  insp_opts.attach(insp_cmd);
  int insp_x = 0, insp_y = 0;
  std::string insp_out;
  insp_cmd->add_option("--x", insp_x, "anchor column")->required();
  insp_cmd->add_option("--y", insp_y, "anchor row")->required();
  insp_cmd->add_option("--out", insp_out, "CSV path (default stdout)");

  // --- profile ---
  auto* prof_cmd = app.add_subcommand("profile", "extract one map row");
  std::string prof_map, prof_gt, prof_out;
  int prof_row = 0;
  prof_cmd->add_option("--map", prof_map, "disparity PFM")->required();
  prof_cmd->add_option("--row", prof_row, "row index")->required();
  prof_cmd->add_option("--gt", prof_gt, "ground truth PFM");
  prof_cmd->add_option("--out", prof_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);

    if (synth_cmd->parsed()) return run_synth(synth_spec, synth_out);

    if (est_cmd->parsed()) {
      Timer timer;
      const SceneConfig scene = est_opts.load_scene();
      const EstimatorConfig cfg = est_opts.estimator_config();
      const LightField lf = load_lightfield(est_opts.input, scene);
      EstimateResult result = estimate_disparity(lf, scene, cfg);

      DisparityMap refined = result.disparity;
      if (!est_opts.no_tv) {
        Grid<uint8_t> smooth(lf.width, lf.height, 0);
        for (int y = 0; y < lf.height; ++y)
          for (int x = 0; x < lf.width; ++x)
            smooth.at(x, y) =
                result.regions.at(x, y) == Region::Smooth ? 1 : 0;
        refined = tv_refine(result.disparity, smooth, est_opts.tv);
      }

      write_pfm(refined, est_out);
      if (!est_initial.empty()) write_pfm(result.initial, est_initial);
      if (!est_argmin.empty()) write_pfm(result.argmin, est_argmin);
      if (!est_regions_png.empty())
        write_png_rgb8(region_colors(result.regions), est_regions_png);
      if (!est_viz.empty())
        write_png_gray8(disparity_render(refined, scene.disparity_min,
                                         scene.disparity_max),
                        est_viz);

      std::optional<MetricsReport> report;
      std::string gt_path = est_gt;
      if (gt_path.empty() && scene.ground_truth_path)
        gt_path =
            (fs::path(est_opts.input) / *scene.ground_truth_path).string();
      if (!gt_path.empty() && fs::exists(gt_path)) {
        const DisparityMap gt = read_pfm(gt_path);
        report = compute_metrics(refined, gt, &result.regions);
      }

      const double elapsed = timer.seconds();
      std::cout << "estimated " << lf.width << "x" << lf.height << " in "
                << elapsed << " s\n";
      if (report) print_metrics(*report, std::cout);

      if (!est_json.empty()) {
        json j;
        j["scene"] = est_opts.input;
        j["params"] = {{"alpha1", cfg.select.alpha1},
                       {"alpha2", cfg.select.alpha2},
                       {"lambda", cfg.lambda},
                       {"gamma", est_opts.tv.gamma},
                       {"grid_step", cfg.fine_step},
                       {"coarse_step", cfg.coarse_step},
                       {"gray_bins", cfg.select.gray_bins},
                       {"baseline", est_opts.baseline},
                       {"metric", est_opts.metric},
                       {"tv", !est_opts.no_tv}};
        if (report) {
          j["metrics"] = region_metrics_json(report->overall);
          j["per_region"] = per_region_json(*report);
        }
        j["runtime_seconds"] = elapsed;
        std::ofstream out(est_json);
        out << j.dump(2) << "\n";
      }
      return 0;
    }

    if (eval_cmd->parsed()) {
      Timer timer;
      const DisparityMap est = read_pfm(eval_est);
      const DisparityMap gt = read_pfm(eval_gt);
      std::optional<RegionMap> regions;
      if (!eval_regions.empty()) regions = read_pgm_labels(eval_regions);
      const MetricsReport report =
          compute_metrics(est, gt, regions ? &*regions : nullptr);

      json j;
      j["scene"] = eval_est;
      j["metrics"] = region_metrics_json(report.overall);
      j["per_region"] = per_region_json(report);
      j["runtime_seconds"] = timer.seconds();
      if (eval_json_flag)
        std::cout << j.dump(2) << "\n";
      else
        print_metrics(report, std::cout);
      if (!eval_out.empty()) {
        std::ofstream out(eval_out);
        out << j.dump(2) << "\n";
      }
      return 0;
    }

    if (reg_cmd->parsed()) {
      const SceneConfig scene = reg_opts.load_scene();
      const EstimatorConfig cfg = reg_opts.estimator_config();
      const LightField lf = load_lightfield(reg_opts.input, scene);
      const DisparityGrid coarse = DisparityGrid::make(
          scene.disparity_min, scene.disparity_max, cfg.coarse_step);
      const DisparityMap init =
          initial_disparity(lf, calibration_for(lf), coarse,
                            cfg.init_window_side, cfg.flat_tol, cfg.match);
      const RegionMap regions = regions_for(lf, init, coarse, cfg);
      write_png_rgb8(region_colors(regions), reg_out);
      if (!reg_pgm.empty()) write_pgm_labels(regions, reg_pgm);
      int counts[4] = {0, 0, 0, 0};
      for (Region r : regions.data()) ++counts[int(r)];
      for (int i = 0; i < 4; ++i)
        std::cout << region_name(Region(i)) << " = " << counts[i] << "\n";
      return 0;
    }

    if (insp_cmd->parsed()) {
      const SceneConfig scene = insp_opts.load_scene();
      const EstimatorConfig cfg = insp_opts.estimator_config();
      const LightField lf = load_lightfield(insp_opts.input, scene);
      if (insp_x < 0 || insp_x >= lf.width || insp_y < 0 ||
          insp_y >= lf.height)
        throw BadConfig("anchor outside the image");
      const DisparityGrid coarse = DisparityGrid::make(
          scene.disparity_min, scene.disparity_max, cfg.coarse_step);
      const DisparityMap init =
          initial_disparity(lf, calibration_for(lf), coarse,
                            cfg.init_window_side, cfg.flat_tol, cfg.match);
      const RegionMap regions = regions_for(lf, init, coarse, cfg);
      const auto table =
          candidate_entropies(lf, init, regions, insp_x, insp_y, cfg.select);
      const WindowChoice choice =
          select_window(lf, init, regions, insp_x, insp_y, cfg.select);

      std::ostringstream csv;
      csv << "shape,side,entropy,selected\n";
      for (const auto& cand : table) {
        if (!cand.evaluated) continue;
        const bool selected = cand.shape == choice.window.shape &&
                              cand.side == choice.window.side;
        csv << int(cand.shape) << "," << cand.side << "," << cand.entropy
            << "," << (selected ? 1 : 0) << "\n";
      }
      if (insp_out.empty()) {
        std::cout << "# anchor (" << insp_x << "," << insp_y << ") region "
                  << region_name(regions.at(insp_x, insp_y)) << "\n";
        std::cout << csv.str();
      } else {
        std::ofstream out(insp_out);
        out << csv.str();
        std::cout << "wrote " << insp_out << "\n";
      }
      return 0;
    }

    if (prof_cmd->parsed()) {
      const DisparityMap map = read_pfm(prof_map);
      const auto profile = extract_profile(map, prof_row);
      std::optional<std::vector<ProfileSample>> gt_profile;
      if (!prof_gt.empty())
        gt_profile = extract_profile(read_pfm(prof_gt), prof_row);

      std::ostringstream csv;
      csv << "x,value,valid" << (gt_profile ? ",gt_value,gt_valid" : "")
          << "\n";
      for (size_t i = 0; i < profile.size(); ++i) {
        csv << profile[i].x << "," << profile[i].value << ","
            << (profile[i].valid ? 1 : 0);
        if (gt_profile)
          csv << "," << (*gt_profile)[i].value << ","
              << ((*gt_profile)[i].valid ? 1 : 0);
        csv << "\n";
      }
      if (prof_out.empty()) {
        std::cout << csv.str();
      } else {
        std::ofstream out(prof_out);
        out << csv.str();
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
