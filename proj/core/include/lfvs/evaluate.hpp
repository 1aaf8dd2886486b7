#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lfvs/checkpoint.hpp"
#include "lfvs/metrics.hpp"

namespace lfvs {

struct EvalEntry {
  std::string scene;
  int v = 0, u = 0;
  double psnr_db = 0.0;
  double msssim_db = 0.0;
  int msssim_scales = 5;  // < 5 flags a reduced pyramid on small frames
};

struct SceneSummary {
  std::string scene;
  double mean_psnr_db = 0.0;
  double mean_msssim_db = 0.0;
};

struct EvalReport {
  std::vector<EvalEntry> entries;
  std::vector<SceneSummary> per_scene;
  // Both aggregation orders are reported: per-view means within each scene
  // averaged across scenes, and the pooled mean over all entries.
  double psnr_scene_mean = 0.0;
  double msssim_scene_mean = 0.0;
  double psnr_pooled = 0.0;
  double msssim_pooled = 0.0;
  std::string checkpoint_id;
  std::string dataset_id;

  void finalize();  // fills per_scene and the aggregates from entries
};

using SceneLoader = std::function<LightField(const std::string&)>;

// Synthesizes every interior view of every scene from its four corners and
// scores Y-channel PSNR and MS-SSIM(dB) against the ground-truth views.
EvalReport evaluate(const nn::Model<float>& model, const SceneLoader& loader,
                    const std::vector<std::string>& scene_ids,
                    const std::string& checkpoint_id = "",
                    const std::string& dataset_id = "");

void write_report_csv(const std::filesystem::path& path, const EvalReport& report);
std::string format_report_summary(const EvalReport& report);

struct AblationRow {
  std::string label;  // LFVS-AM / LFVS
  int n_resgroups = 0;
  int n_cbams = 0;
  bool attention = true;
  double psnr_db = 0.0;
  double msssim_db = 0.0;
};

struct AblationEntry {
  std::string label;
  std::filesystem::path checkpoint_path;
};

std::vector<AblationRow> ablation_grid(const std::vector<AblationEntry>& checkpoints,
                                       const SceneLoader& loader,
                                       const std::vector<std::string>& scene_ids);

std::string format_ablation_table(const std::vector<AblationRow>& rows);
void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<AblationRow>& rows);

// Relative crop window (fractions of width/height), as used for zoomed
// qualitative comparisons.
struct CropBox {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};

// Writes synthesized views, ground truth, absolute-error heatmaps, and zoom
// crops for the given targets.
void export_qualitative(const nn::Model<float>& model, const LightField& lf,
                        const std::string& scene_name,
                        const std::vector<GridCoord>& targets,
                        const std::vector<CropBox>& crops,
                        const std::filesystem::path& out_dir);

}  // namespace lfvs
