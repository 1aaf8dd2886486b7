#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "lfvs/dataset.hpp"
#include "lfvs/evaluate.hpp"
#include "lfvs/image_io.hpp"
#include "lfvs/manifest.hpp"
#include "lfvs/synthetic.hpp"
#include "lfvs/trainer.hpp"

namespace fs = std::filesystem;
using namespace lfvs;

namespace {

fs::path resolve_data_dir(std::string data) {
  if (data.empty()) {
    const char* root = std::getenv("LFVS_DATA_ROOT");
    require_usage(root != nullptr,
                  "no --data given and LFVS_DATA_ROOT is not set");
    return fs::path(root);
  }
  return fs::path(data);
}

GridCoord parse_target(const std::string& s) {
  const auto comma = s.find(',');
  require_usage(comma != std::string::npos, "expected --target u,v");
  try {
    GridCoord t;
    t.u = std::stoi(s.substr(0, comma));
    t.v = std::stoi(s.substr(comma + 1));
    return t;
  } catch (...) {
    throw UsageError("cannot parse target coordinate: " + s);
  }
}

std::vector<std::string> scene_split(const fs::path& data, const std::string& split_file,
                                     const DatasetSpec& spec) {
  if (!split_file.empty()) return read_manifest(split_file);
  return list_scenes(spec);
}

RunManifest base_manifest(const std::string& command, uint64_t seed,
                          const fs::path& out_dir) {
  RunManifest m;
  m.command = command;
  m.seed = seed;
  m.output_dir = out_dir.string();
  m.tool_version = version_string();
  return m;
}

int cmd_prepare(const std::string& synthetic_cfg, const std::string& dataset,
                bool lenslet, int count, int test_count, uint64_t seed,
                const fs::path& out_dir) {
  fs::create_directories(out_dir);
  RunManifest manifest = base_manifest("prepare", seed, out_dir);

  if (!synthetic_cfg.empty()) {
    const Config cfg = Config::load(synthetic_cfg);
    const auto dist = SyntheticDistribution::from_config(cfg);
    manifest.config_path = synthetic_cfg;
    manifest.resolved["count"] = std::to_string(count);
    for (const auto& [k, v] : cfg.entries()) manifest.resolved[k] = v;
    for (int i = 0; i < count; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "scene_%04d", i);
      const auto spec = dist.sample(Rng::derive(seed, uint64_t(i)));
      const SyntheticScene scene = generate_synthetic(spec);
      const fs::path scene_dir = out_dir / name;
      write_lightfield(scene_dir, scene.lf);
      for (int v = 0; v < scene.lf.n_v; ++v)
        for (int u = 0; u < scene.lf.n_u; ++u)
          write_pfm(scene_dir /
                        ("disp_" + std::to_string(v) + "_" + std::to_string(u) + ".pfm"),
                    scene.disparity(v, u));
    }
    manifest.write(out_dir / "manifest.json");
    std::cout << "generated " << count << " synthetic scenes in " << out_dir << "\n";
    return 0;
  }

  require_usage(!dataset.empty(), "prepare needs --synthetic or --dataset");
  DatasetSpec spec;
  spec.root = dataset;
  spec.layout = lenslet ? DatasetSpec::Layout::lenslet_grid : DatasetSpec::Layout::view_dirs;
  const auto ids = list_scenes(spec);
  const SplitResult split = split_dataset(ids, test_count, seed);
  write_manifest(out_dir / "train.txt", split.train_ids);
  write_manifest(out_dir / "test.txt", split.test_ids);
  manifest.resolved["dataset"] = dataset;
  manifest.resolved["test_count"] = std::to_string(test_count);
  manifest.resolved["scenes"] = std::to_string(ids.size());
  manifest.write(out_dir / "manifest.json");
  std::cout << "split " << ids.size() << " scenes into " << split.train_ids.size()
            << " train / " << split.test_ids.size() << " test\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& data,
              const std::string& split_file, const std::string& val_split_file,
              const std::string& resume_path, const fs::path& out_dir, long steps_flag,
              long seed_flag) {
  Config cfg = config_path.empty() ? Config() : Config::load(config_path);
  // CLI flag > config file > default.
  if (steps_flag >= 0) cfg.set("steps", std::to_string(steps_flag));
  if (seed_flag >= 0) cfg.set("seed", std::to_string(seed_flag));
  const TrainConfig tc = TrainConfig::from_config(cfg);

  DatasetSpec spec;
  spec.root = resolve_data_dir(data);
  const auto train_ids = scene_split(spec.root, split_file, spec);
  require_data(!train_ids.empty(), "training split is empty");
  std::vector<std::string> val_ids;
  if (!val_split_file.empty()) val_ids = read_manifest(val_split_file);

  auto make_pool = [&](const std::vector<std::string>& ids) {
    return ScenePool(
        [spec, ids](size_t i) { return load_lightfield(spec, ids[i]); }, ids.size(),
        size_t(tc.scene_cache));
  };

  Trainer trainer(tc, make_pool(train_ids), make_pool(val_ids), out_dir);
  if (!resume_path.empty())
    trainer.resume(resume_path);
  else
    trainer.init_model(tc.seed);

  RunManifest manifest = base_manifest("train", tc.seed, out_dir);
  manifest.config_path = config_path;
  for (const auto& [k, v] : cfg.entries()) manifest.resolved[k] = v;
  manifest.resolved["data"] = spec.root.string();
  manifest.resolved["train_scenes"] = std::to_string(train_ids.size());

  const TrainResult result = trainer.run(/*echo_progress=*/true);
  manifest.checkpoints = {result.latest_checkpoint.string(),
                          result.best_checkpoint.string()};
  manifest.write(out_dir / "manifest.json");
  std::cout << "finished at step " << result.final_step << ", loss "
            << result.last_loss << "\n";
  return 0;
}

int cmd_synthesize(const std::string& ckpt_path, const std::string& scene_dir,
                   const std::vector<std::string>& target_flags, bool all_interior,
                   bool dump_disparity, bool dump_warped, const fs::path& out_dir) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const auto model = model_from_checkpoint<float>(ckpt);

  // Only the four corner views are required on disk.
  const LightField probe = [&] {
    LightField lf;
    int max_v = -1, max_u = -1;
    for (const auto& e : fs::directory_iterator(scene_dir)) {
      int v, u;
      if (std::sscanf(e.path().filename().string().c_str(), "view_%d_%d.png", &v, &u) == 2) {
        max_v = std::max(max_v, v);
        max_u = std::max(max_u, u);
      }
    }
    require_data(max_v >= 1 && max_u >= 1, "no corner views found in " + scene_dir);
    lf.n_v = max_v + 1;
    lf.n_u = max_u + 1;
    return lf;
  }();
  const AngularGrid grid{probe.n_v, probe.n_u};

  auto corner = [&](int v, int u) {
    const fs::path p = fs::path(scene_dir) / view_filename(v, u);
    require_data(fs::exists(p), "missing corner view: " + p.string());
    return read_png_rgb(p);
  };
  const std::array<Tensor<float>, 4> corners = {
      corner(0, 0), corner(0, grid.n_u - 1), corner(grid.n_v - 1, 0),
      corner(grid.n_v - 1, grid.n_u - 1)};

  std::vector<GridCoord> targets;
  if (all_interior) {
    for (int v = 0; v < grid.n_v; ++v)
      for (int u = 0; u < grid.n_u; ++u)
        if (!grid.is_corner({v, u})) targets.push_back({v, u});
  }
  for (const auto& s : target_flags) targets.push_back(parse_target(s));
  require_usage(!targets.empty(), "no targets: use --target u,v or --all-interior");

  fs::create_directories(out_dir);
  nn::Model<float>::SynthesizeOptions opts;
  opts.keep_diagnostics = dump_disparity || dump_warped;
  for (const GridCoord& t : targets) {
    require_usage(!grid.is_corner(t), "target " + std::to_string(t.u) + "," +
                                          std::to_string(t.v) +
                                          " is a corner view (an input, not a target)");
    auto synth = model.synthesize(corners, grid, t, opts);
    const std::string stem = "v" + std::to_string(t.v) + "_u" + std::to_string(t.u);
    write_png_rgb(out_dir / ("synth_" + stem + ".png"),
                  nn::from_work_range(synth.image));
    if (dump_disparity) {
      const char* role[3] = {"L", "R", "B"};
      for (int i = 0; i < 3; ++i)
        write_pfm(out_dir / ("disp_" + stem + "_" + role[i] + ".pfm"),
                  unflip(synth.disparity[size_t(i)], synth.selection));
    }
    if (dump_warped) {
      const char* role[3] = {"L", "R", "B"};
      for (int i = 0; i < 3; ++i)
        write_png_rgb(out_dir / ("warped_" + stem + "_" + role[i] + ".png"),
                      nn::from_work_range(unflip(synth.warped[size_t(i)], synth.selection)));
    }
  }

  RunManifest manifest = base_manifest("synthesize", 0, out_dir);
  manifest.checkpoints = {ckpt_path};
  manifest.resolved["scene"] = scene_dir;
  manifest.resolved["targets"] = std::to_string(targets.size());
  manifest.write(out_dir / "manifest.json");
  std::cout << "wrote " << targets.size() << " synthesized view(s) to " << out_dir
            << "\n";
  return 0;
}

int cmd_evaluate(const std::string& ckpt_path, const std::string& data,
                 const std::string& split_file, const std::string& ablate_cfg,
                 const std::string& qualitative, const std::vector<std::string>& crops,
                 const std::vector<std::string>& target_flags, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  DatasetSpec spec;
  spec.root = resolve_data_dir(data);
  const auto ids = scene_split(spec.root, split_file, spec);
  require_data(!ids.empty(), "evaluation split is empty");
  const SceneLoader loader = [spec](const std::string& id) {
    return load_lightfield(spec, id);
  };

  RunManifest manifest = base_manifest("evaluate", 0, out_dir);
  manifest.resolved["data"] = spec.root.string();
  manifest.resolved["scenes"] = std::to_string(ids.size());

  if (!ablate_cfg.empty()) {
    const Config cfg = Config::load(ablate_cfg);
    std::vector<AblationEntry> entries;
    for (int i = 1;; ++i) {
      const std::string key = "row" + std::to_string(i);
      if (!cfg.has(key + ".checkpoint")) break;
      AblationEntry e;
      e.checkpoint_path = cfg.get_str(key + ".checkpoint");
      e.label = cfg.get_str(key + ".label", "");
      entries.push_back(std::move(e));
    }
    require_data(!entries.empty(), "no rowN.checkpoint entries in " + ablate_cfg);
    const auto rows = ablation_grid(entries, loader, ids);
    const std::string table = format_ablation_table(rows);
    write_ablation_csv(out_dir / "ablation.csv", rows);
    std::ofstream(out_dir / "ablation.txt") << table;
    std::cout << table;
    for (const auto& e : entries) manifest.checkpoints.push_back(e.checkpoint_path.string());
    manifest.write(out_dir / "manifest.json");
    return 0;
  }

  require_usage(!ckpt_path.empty(), "evaluate needs --ckpt (or --ablate)");
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const auto model = model_from_checkpoint<float>(ckpt);
  manifest.checkpoints = {ckpt_path};

  if (!qualitative.empty()) {
    std::string scene = qualitative;
    if (scene.rfind("scene:", 0) == 0) scene = scene.substr(6);
    std::vector<CropBox> boxes;
    for (const auto& c : crops) {
      CropBox b;
      require_usage(std::sscanf(c.c_str(), "%lf,%lf,%lf,%lf", &b.x0, &b.y0, &b.x1,
                                &b.y1) == 4,
                    "expected --crop x0,y0,x1,y1");
      boxes.push_back(b);
    }
    const LightField lf = loader(scene);
    const AngularGrid grid{lf.n_v, lf.n_u};
    std::vector<GridCoord> targets;
    for (const auto& s : target_flags) targets.push_back(parse_target(s));
    if (targets.empty()) targets.push_back({grid.n_v / 2, grid.n_u / 2});
    export_qualitative(model, lf, scene, targets, boxes, out_dir / "qualitative");
    manifest.resolved["qualitative_scene"] = scene;
    manifest.write(out_dir / "manifest.json");
    std::cout << "wrote qualitative exports for scene " << scene << "\n";
    return 0;
  }

  const EvalReport report =
      evaluate(model, loader, ids, fs::path(ckpt_path).filename().string(),
               spec.root.filename().string());
  write_report_csv(out_dir / "report.csv", report);
  const std::string summary = format_report_summary(report);
  std::ofstream(out_dir / "summary.txt") << summary;
  std::cout << summary;
  manifest.write(out_dir / "manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-field view synthesis: dataset preparation, training, "
               "synthesis, and evaluation"};
  app.require_subcommand(1);

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Generate synthetic scenes or split a dataset");
  std::string p_synth, p_dataset, p_out;
  bool p_lenslet = false;
  int p_count = 10, p_test = 0;
  long p_seed = 1;
  prepare->add_option("--synthetic", p_synth, "synthetic scene distribution config");
  prepare->add_option("--count", p_count, "number of synthetic scenes");
  prepare->add_option("--dataset", p_dataset, "existing dataset root to split");
  prepare->add_flag("--lenslet", p_lenslet, "dataset uses packed lenslet PNGs");
  prepare->add_option("--test", p_test, "test scene count for the split");
  prepare->add_option("--seed", p_seed, "random seed");
  prepare->add_option("--out", p_out, "output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Train a model");
  std::string t_config, t_data, t_split, t_val_split, t_resume, t_out;
  long t_steps = -1, t_seed = -1;
  train->add_option("--config", t_config, "training config file");
  train->add_option("--data", t_data, "dataset root (or $LFVS_DATA_ROOT)");
  train->add_option("--split", t_split, "training split manifest");
  train->add_option("--val-split", t_val_split, "validation split manifest");
  train->add_option("--resume", t_resume, "checkpoint to resume from");
  train->add_option("--steps", t_steps, "override step budget");
  train->add_option("--seed", t_seed, "override seed");
  train->add_option("--out", t_out, "run output directory")->required();

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "Render novel views from 4 corner views");
  std::string s_ckpt, s_scene, s_out;
  std::vector<std::string> s_targets;
  bool s_all = false, s_disp = false, s_warped = false;
  synth->add_option("--ckpt", s_ckpt, "checkpoint")->required();
  synth->add_option("--scene", s_scene, "scene directory with corner views")->required();
  synth->add_option("--target", s_targets, "target angular position u,v (repeatable)");
  synth->add_flag("--all-interior", s_all, "render all non-corner positions");
  synth->add_flag("--dump-disparity", s_disp, "write the three disparity maps (PFM)");
  synth->add_flag("--dump-warped", s_warped, "write the three warped views");
  synth->add_option("--out", s_out, "output directory")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a checkpoint or run an ablation grid");
  std::string e_ckpt, e_data, e_split, e_ablate, e_qual, e_out;
  std::vector<std::string> e_crops, e_targets;
  eval->add_option("--ckpt", e_ckpt, "checkpoint");
  eval->add_option("--data", e_data, "dataset root (or $LFVS_DATA_ROOT)");
  eval->add_option("--split", e_split, "scene split manifest");
  eval->add_option("--ablate", e_ablate, "ablation grid config (rowN.checkpoint keys)");
  eval->add_option("--qualitative", e_qual, "scene:NAME to export visual comparisons");
  eval->add_option("--crop", e_crops, "zoom crop box x0,y0,x1,y1 (repeatable)");
  eval->add_option("--target", e_targets, "target u,v for qualitative export");
  eval->add_option("--out", e_out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (*prepare)
      return cmd_prepare(p_synth, p_dataset, p_lenslet, p_count, p_test,
                         uint64_t(p_seed), p_out);
    if (*train)
      return cmd_train(t_config, t_data, t_split, t_val_split, t_resume, t_out,
                       t_steps, t_seed);
    if (*synth)
      return cmd_synthesize(s_ckpt, s_scene, s_targets, s_all, s_disp, s_warped, s_out);
    if (*eval)
      return cmd_evaluate(e_ckpt, e_data, e_split, e_ablate, e_qual, e_crops,
                          e_targets, e_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
