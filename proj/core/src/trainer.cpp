#include "lfvs/trainer.hpp"

#include <fstream>
#include <iostream>

#include "lfvs/metrics.hpp"

namespace lfvs {

TrainConfig TrainConfig::from_config(const Config& cfg) {
  TrainConfig t;
  t.crop_size = int(cfg.get_int("crop_size", t.crop_size));
  t.gamma_min = cfg.get_double("gamma_min", t.gamma_min);
  t.gamma_max = cfg.get_double("gamma_max", t.gamma_max);
  t.learning_rate = cfg.get_double("learning_rate", t.learning_rate);
  t.adam_beta1 = cfg.get_double("adam_beta1", t.adam_beta1);
  t.adam_beta2 = cfg.get_double("adam_beta2", t.adam_beta2);
  t.batch_size = int(cfg.get_int("batch_size", t.batch_size));
  t.steps = cfg.get_int("steps", t.steps);
  t.seed = uint64_t(cfg.get_int("seed", long(t.seed)));
  t.checkpoint_every = int(cfg.get_int("checkpoint_every", t.checkpoint_every));
  t.log_every = int(cfg.get_int("log_every", t.log_every));
  t.val_targets = int(cfg.get_int("val_targets", t.val_targets));
  t.scene_cache = int(cfg.get_int("scene_cache", t.scene_cache));
  t.loss.lambda1 = cfg.get_double("lambda1", t.loss.lambda1);
  t.loss.lambda2 = cfg.get_double("lambda2", t.loss.lambda2);
  t.loss.lambda3 = cfg.get_double("lambda3", t.loss.lambda3);
  t.model.n_resgroups = int(cfg.get_int("n_resgroups", t.model.n_resgroups));
  t.model.n_cbam_per_group =
      int(cfg.get_int("n_cbam_per_group", t.model.n_cbam_per_group));
  t.model.attention = cfg.get_bool("attention", t.model.attention);
  t.model.fe_channels = int(cfg.get_int("fe_channels", t.model.fe_channels));
  t.model.fd_hidden = int(cfg.get_int("fd_hidden", t.model.fd_hidden));
  t.model.refine_width = int(cfg.get_int("refine_width", t.model.refine_width));
  t.model.ca_reduction = int(cfg.get_int("ca_reduction", t.model.ca_reduction));
  t.model.fe_branch_tap = int(cfg.get_int("fe_branch_tap", t.model.fe_branch_tap));
  t.validate();
  return t;
}

void TrainConfig::validate() const {
  require_data(crop_size > 0, "train config: crop_size must be positive");
  require_data(gamma_min > 0 && gamma_min <= gamma_max,
               "train config: gamma range must satisfy 0 < min <= max");
  require_data(batch_size > 0 && steps >= 0, "train config: bad batch/steps");
  require_data(loss.lambda1 >= 0 && loss.lambda2 >= 0 && loss.lambda3 >= 0,
               "train config: loss weights must be nonnegative");
  model.validate();
}

ScenePool::ScenePool(std::function<LightField(size_t)> loader, size_t count,
                     size_t capacity)
    : loader_(std::move(loader)), count_(count), capacity_(std::max<size_t>(1, capacity)) {}

const LightField& ScenePool::get(size_t index) {
  require(index < count_, "scene index out of range");
  for (auto it = cache_.begin(); it != cache_.end(); ++it) {
    if (it->first == index) {
      cache_.splice(cache_.begin(), cache_, it);
      return *cache_.front().second;
    }
  }
  auto lf = std::make_shared<LightField>(loader_(index));
  cache_.emplace_front(index, std::move(lf));
  while (cache_.size() > capacity_) cache_.pop_back();
  return *cache_.front().second;
}

Trainer::Trainer(TrainConfig cfg, ScenePool train_scenes, ScenePool val_scenes,
                 std::filesystem::path out_dir)
    : cfg_(std::move(cfg)),
      train_(std::move(train_scenes)),
      val_(std::move(val_scenes)),
      out_dir_(std::move(out_dir)) {
  cfg_.validate();
  require_data(!train_.empty(), "training split is empty");
  std::filesystem::create_directories(out_dir_);
}

void Trainer::init_model(uint64_t model_seed) {
  model_ = nn::Model<float>::create(cfg_.model, model_seed);
  optimizer_ = nn::Adam<float>(model_.parameters(), cfg_.learning_rate,
                               cfg_.adam_beta1, cfg_.adam_beta2);
  step_ = 0;
}

void Trainer::resume(const std::filesystem::path& checkpoint_path) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  require_data(ckpt.hyperparams == cfg_.model,
               "checkpoint/architecture mismatch: " + checkpoint_path.string());
  model_ = model_from_checkpoint<float>(ckpt);
  optimizer_ = nn::Adam<float>(model_.parameters(), cfg_.learning_rate,
                               cfg_.adam_beta1, cfg_.adam_beta2);
  for (auto& [name, t] : optimizer_.first_moments()) {
    auto it = ckpt.optimizer_state.find("m." + name);
    if (it != ckpt.optimizer_state.end()) t = it->second.cast<float>();
  }
  for (auto& [name, t] : optimizer_.second_moments()) {
    auto it = ckpt.optimizer_state.find("v." + name);
    if (it != ckpt.optimizer_state.end()) t = it->second.cast<float>();
  }
  step_ = ckpt.step;
  optimizer_.set_step_count(ckpt.step);
}

void Trainer::save_checkpoint_file(const std::filesystem::path& path) {
  Checkpoint ckpt = snapshot_model(model_);
  ckpt.step = step_;
  ckpt.meta["seed"] = std::to_string(cfg_.seed);
  ckpt.meta["tool_version"] = version_string();
  for (auto& [name, t] : optimizer_.first_moments())
    ckpt.optimizer_state["m." + name] = t.cast<double>();
  for (auto& [name, t] : optimizer_.second_moments())
    ckpt.optimizer_state["v." + name] = t.cast<double>();
  save_checkpoint(path, ckpt);
}

double Trainer::validation_psnr() {
  if (val_.empty() || cfg_.val_targets <= 0) return 0.0;
  double acc = 0.0;
  long n = 0;
  for (size_t i = 0; i < val_.size(); ++i) {
    const LightField& lf = val_.get(i);
    const AngularGrid grid{lf.n_v, lf.n_u};
    const auto targets = interior_targets(grid);
    const size_t stride = std::max<size_t>(1, targets.size() / size_t(cfg_.val_targets));
    const std::array<Tensor<float>, 4> corners = {
        lf.view(0, 0), lf.view(0, lf.n_u - 1), lf.view(lf.n_v - 1, 0),
        lf.view(lf.n_v - 1, lf.n_u - 1)};
    for (size_t t = 0; t < targets.size() && n < long(val_.size()) * cfg_.val_targets;
         t += stride) {
      auto result = model_.synthesize(corners, grid, targets[t]);
      acc += psnr_y(from_work_range(result.image), lf.view(targets[t].v, targets[t].u));
      ++n;
    }
  }
  return n > 0 ? acc / double(n) : 0.0;
}

TrainResult Trainer::run(bool echo_progress) {
  require(model_.parameter_count() > 0, "trainer: model not initialized");

  const AugmentConfig aug{cfg_.crop_size, cfg_.gamma_min, cfg_.gamma_max};
  std::ofstream log(out_dir_ / "loss_log.csv", step_ > 0 ? std::ios::app : std::ios::out);
  require_data(bool(log), "cannot write loss log in " + out_dir_.string());
  if (step_ == 0) log << "step,total,final_term,warp_term\n";

  TrainResult result;
  result.best_checkpoint = out_dir_ / "best.ckpt";
  result.latest_checkpoint = out_dir_ / "latest.ckpt";

  while (step_ < cfg_.steps) {
    ++step_;
    // Per-step RNG derived from (seed, step): resuming from a checkpoint
    // replays the identical sample sequence.
    Rng rng(Rng::derive(cfg_.seed, uint64_t(step_)));

    model_.zero_grad();
    double total_sum = 0.0, final_sum = 0.0, warp_sum = 0.0;
    for (int b = 0; b < cfg_.batch_size; ++b) {
      const LightField& lf = train_.get(rng.uniform_int(train_.size()));
      const AngularGrid grid{lf.n_v, lf.n_u};
      const auto targets = interior_targets(grid);
      const GridCoord target = targets[rng.uniform_int(targets.size())];
      const TrainSample sample = augment_sample(lf, target, aug, rng);

      auto sel = select_views_from_corners(sample.corners01, grid, target);
      auto prepared = nn::Model<float>::prepare(sel);
      // The loss is evaluated pre-unflip; flipping the ground truth instead
      // of unflipping the prediction is equivalent for L1.
      Tensor<float> gt = nn::to_work_range(
          flip_image(sample.target01, sel.flip_h, sel.flip_v));

      auto fwd = model_.run(prepared);
      auto gt_var = nn::constant(std::move(gt));
      auto final_term = nn::loss_final(fwd.pred, gt_var, float(cfg_.loss.lambda1));
      auto warp_term = nn::loss_warp(fwd.warped, gt_var, float(cfg_.loss.lambda2),
                                     float(cfg_.loss.lambda3));
      auto total = nn::s_add(final_term, warp_term);
      nn::backward(nn::s_scale(total, 1.0f / float(cfg_.batch_size)));

      total_sum += double(total->val[0]);
      final_sum += double(final_term->val[0]);
      warp_sum += double(warp_term->val[0]);
    }

    const double total = total_sum / cfg_.batch_size;
    if (!std::isfinite(total)) {
      const auto diag = out_dir_ / ("diagnostic_step_" + std::to_string(step_) + ".ckpt");
      save_checkpoint_file(diag);
      throw NumericError("non-finite loss at step " + std::to_string(step_) +
                         "; diagnostic checkpoint written to " + diag.string());
    }
    optimizer_.step();

    log << step_ << "," << total << "," << final_sum / cfg_.batch_size << ","
        << warp_sum / cfg_.batch_size << "\n";
    result.last_loss = total;

    if (echo_progress && (step_ % cfg_.log_every == 0 || step_ == cfg_.steps))
      std::cout << "step " << step_ << "/" << cfg_.steps << "  loss " << total
                << std::endl;

    if (step_ % cfg_.checkpoint_every == 0 || step_ == cfg_.steps) {
      save_checkpoint_file(result.latest_checkpoint);
      const double val = validation_psnr();
      if (val > best_val_) {
        best_val_ = val;
        save_checkpoint_file(result.best_checkpoint);
      }
    }
  }
  log.flush();
  result.final_step = step_;
  result.best_val_psnr = best_val_;
  if (!std::filesystem::exists(result.latest_checkpoint))
    save_checkpoint_file(result.latest_checkpoint);
  if (!std::filesystem::exists(result.best_checkpoint))
    save_checkpoint_file(result.best_checkpoint);
  return result;
}

}  // namespace lfvs
