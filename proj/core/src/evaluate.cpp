#include "lfvs/evaluate.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "lfvs/augment.hpp"
#include "lfvs/image_io.hpp"

namespace lfvs {

void EvalReport::finalize() {
  per_scene.clear();
  std::map<std::string, std::pair<double, double>> acc;  // psnr, msssim sums
  std::map<std::string, long> counts;
  double psnr_all = 0.0, ms_all = 0.0;
  for (const auto& e : entries) {
    acc[e.scene].first += e.psnr_db;
    acc[e.scene].second += e.msssim_db;
    counts[e.scene] += 1;
    psnr_all += e.psnr_db;
    ms_all += e.msssim_db;
  }
  double psnr_scene = 0.0, ms_scene = 0.0;
  for (const auto& [scene, sums] : acc) {
    SceneSummary s;
    s.scene = scene;
    s.mean_psnr_db = sums.first / double(counts[scene]);
    s.mean_msssim_db = sums.second / double(counts[scene]);
    per_scene.push_back(s);
    psnr_scene += s.mean_psnr_db;
    ms_scene += s.mean_msssim_db;
  }
  const double n_scenes = double(per_scene.size());
  const double n_entries = double(entries.size());
  psnr_scene_mean = n_scenes > 0 ? psnr_scene / n_scenes : 0.0;
  msssim_scene_mean = n_scenes > 0 ? ms_scene / n_scenes : 0.0;
  psnr_pooled = n_entries > 0 ? psnr_all / n_entries : 0.0;
  msssim_pooled = n_entries > 0 ? ms_all / n_entries : 0.0;
}

EvalReport evaluate(const nn::Model<float>& model, const SceneLoader& loader,
                    const std::vector<std::string>& scene_ids,
                    const std::string& checkpoint_id, const std::string& dataset_id) {
  EvalReport report;
  report.checkpoint_id = checkpoint_id;
  report.dataset_id = dataset_id;
  for (const auto& id : scene_ids) {
    const LightField lf = loader(id);
    const AngularGrid grid{lf.n_v, lf.n_u};
    const std::array<Tensor<float>, 4> corners = {
        lf.view(0, 0), lf.view(0, lf.n_u - 1), lf.view(lf.n_v - 1, 0),
        lf.view(lf.n_v - 1, lf.n_u - 1)};
    for (const GridCoord& t : interior_targets(grid)) {
      auto synth = model.synthesize(corners, grid, t);
      const Tensor<float> pred01 = nn::from_work_range(synth.image);
      const Tensor<float>& gt01 = lf.view(t.v, t.u);
      EvalEntry e;
      e.scene = id;
      e.v = t.v;
      e.u = t.u;
      e.psnr_db = psnr_y(pred01, gt01);
      const MsssimResult ms = msssim_y(pred01, gt01);
      e.msssim_db = msssim_to_db(ms.score);
      e.msssim_scales = ms.scales;
      report.entries.push_back(std::move(e));
    }
  }
  report.finalize();
  return report;
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path);
  require_data(bool(out), "cannot write report: " + path.string());
  out << "scene,v,u,psnr_db,msssim_db,msssim_scales\n";
  out << std::setprecision(10);
  for (const auto& e : report.entries)
    out << e.scene << "," << e.v << "," << e.u << "," << e.psnr_db << ","
        << e.msssim_db << "," << e.msssim_scales << "\n";
  // Aggregates in both orders: per-scene means averaged, and pooled.
  out << "aggregate,scene_mean,," << report.psnr_scene_mean << ","
      << report.msssim_scene_mean << ",\n";
  out << "aggregate,pooled,," << report.psnr_pooled << "," << report.msssim_pooled
      << ",\n";
}

std::string format_report_summary(const EvalReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "scene                          PSNR (dB)   MS-SSIM (dB)\n";
  os << "------------------------------------------------------\n";
  for (const auto& s : report.per_scene)
    os << std::left << std::setw(30) << s.scene << std::right << std::setw(9)
       << s.mean_psnr_db << std::setw(15) << s.mean_msssim_db << "\n";
  os << "------------------------------------------------------\n";
  os << std::left << std::setw(30) << "mean over scenes" << std::right << std::setw(9)
     << report.psnr_scene_mean << std::setw(15) << report.msssim_scene_mean << "\n";
  os << std::left << std::setw(30) << "pooled over views" << std::right << std::setw(9)
     << report.psnr_pooled << std::setw(15) << report.msssim_pooled << "\n";
  return os.str();
}

std::vector<AblationRow> ablation_grid(const std::vector<AblationEntry>& checkpoints,
                                       const SceneLoader& loader,
                                       const std::vector<std::string>& scene_ids) {
  std::vector<AblationRow> rows;
  for (const auto& entry : checkpoints) {
    const Checkpoint ckpt = load_checkpoint(entry.checkpoint_path);
    const auto model = model_from_checkpoint<float>(ckpt);
    const EvalReport rep = evaluate(model, loader, scene_ids,
                                    entry.checkpoint_path.filename().string());
    AblationRow row;
    row.label = !entry.label.empty() ? entry.label
                : ckpt.hyperparams.attention ? std::string("LFVS-AM")
                                             : std::string("LFVS");
    row.n_resgroups = ckpt.hyperparams.n_resgroups;
    row.n_cbams = ckpt.hyperparams.n_cbam_per_group;
    row.attention = ckpt.hyperparams.attention;
    row.psnr_db = rep.psnr_scene_mean;
    row.msssim_db = rep.msssim_scene_mean;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "model      # ResGroups   # CBAMs   attention   PSNR (dB)   MS-SSIM (dB)\n";
  os << "------------------------------------------------------------------------\n";
  for (const auto& r : rows)
    os << std::left << std::setw(11) << r.label << std::right << std::setw(11)
       << r.n_resgroups << std::setw(10) << r.n_cbams << std::setw(12)
       << (r.attention ? "on" : "off") << std::setw(12) << r.psnr_db << std::setw(15)
       << r.msssim_db << "\n";
  return os.str();
}

void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<AblationRow>& rows) {
  std::ofstream out(path);
  require_data(bool(out), "cannot write ablation report: " + path.string());
  out << "label,n_resgroups,n_cbams,attention,psnr_db,msssim_db\n";
  out << std::setprecision(10);
  for (const auto& r : rows)
    out << r.label << "," << r.n_resgroups << "," << r.n_cbams << ","
        << (r.attention ? 1 : 0) << "," << r.psnr_db << "," << r.msssim_db << "\n";
}

namespace {

Tensor<float> error_heatmap(const Tensor<float>& a, const Tensor<float>& b) {
  const int h = a.height(), w = a.width();
  Tensor<float> err({1, h, w});
  float peak = 0.0f;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float e = 0.0f;
      for (int c = 0; c < 3; ++c) e += std::abs(a.at(c, y, x) - b.at(c, y, x));
      e /= 3.0f;
      err.at(0, y, x) = e;
      peak = std::max(peak, e);
    }
  if (peak > 0.0f)
    for (long i = 0; i < err.numel(); ++i) err[i] /= peak;
  return err;
}

Tensor<float> crop_relative(const Tensor<float>& img, const CropBox& box) {
  const int h = img.height(), w = img.width();
  require_usage(box.x0 >= 0 && box.y0 >= 0 && box.x1 <= 1 && box.y1 <= 1 &&
                    box.x0 < box.x1 && box.y0 < box.y1,
                "crop box outside frame");
  const int x0 = int(box.x0 * w), x1 = std::max(x0 + 1, int(box.x1 * w));
  const int y0 = int(box.y0 * h), y1 = std::max(y0 + 1, int(box.y1 * h));
  Tensor<float> out({img.dim(0), y1 - y0, x1 - x0});
  for (int c = 0; c < img.dim(0); ++c)
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) out.at(c, y - y0, x - x0) = img.at(c, y, x);
  return out;
}

}  // namespace

void export_qualitative(const nn::Model<float>& model, const LightField& lf,
                        const std::string& scene_name,
                        const std::vector<GridCoord>& targets,
                        const std::vector<CropBox>& crops,
                        const std::filesystem::path& out_dir) {
  if (targets.empty()) return;
  std::filesystem::create_directories(out_dir);
  const AngularGrid grid{lf.n_v, lf.n_u};
  const std::array<Tensor<float>, 4> corners = {
      lf.view(0, 0), lf.view(0, lf.n_u - 1), lf.view(lf.n_v - 1, 0),
      lf.view(lf.n_v - 1, lf.n_u - 1)};
  for (const GridCoord& t : targets) {
    auto synth = model.synthesize(corners, grid, t);
    const Tensor<float> pred01 = nn::from_work_range(synth.image);
    const Tensor<float>& gt01 = lf.view(t.v, t.u);
    const std::string stem =
        scene_name + "_v" + std::to_string(t.v) + "_u" + std::to_string(t.u);
    write_png_rgb(out_dir / (stem + "_synth.png"), pred01);
    write_png_rgb(out_dir / (stem + "_gt.png"), gt01);
    write_png_gray(out_dir / (stem + "_err.png"), error_heatmap(pred01, gt01));
    for (size_t i = 0; i < crops.size(); ++i) {
      const std::string suffix = "_crop" + std::to_string(i);
      write_png_rgb(out_dir / (stem + suffix + "_synth.png"),
                    crop_relative(pred01, crops[i]));
      write_png_rgb(out_dir / (stem + suffix + "_gt.png"),
                    crop_relative(gt01, crops[i]));
    }
  }
}

}  // namespace lfvs
