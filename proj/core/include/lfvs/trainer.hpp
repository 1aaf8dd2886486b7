#pragma once

#include <filesystem>
#include <functional>
#include <list>
#include <memory>

#include "lfvs/adam.hpp"
#include "lfvs/augment.hpp"
#include "lfvs/checkpoint.hpp"
#include "lfvs/config.hpp"
#include "lfvs/loss.hpp"

namespace lfvs {

struct TrainConfig {
  int crop_size = 192;
  double gamma_min = 0.4;
  double gamma_max = 1.0;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.99;
  int batch_size = 8;
  long steps = 2000;
  uint64_t seed = 1;
  int checkpoint_every = 500;
  int log_every = 25;
  int val_targets = 4;  // targets per validation scene for best tracking
  int scene_cache = 64;
  nn::LossWeights loss;
  nn::ModelHyperparams model;

  static TrainConfig from_config(const Config& cfg);
  void validate() const;
};

// Lazily loads scenes by index, keeping up to `capacity` decoded
// light-fields in memory (LRU eviction).
class ScenePool {
 public:
  ScenePool() = default;
  ScenePool(std::function<LightField(size_t)> loader, size_t count, size_t capacity);

  const LightField& get(size_t index);
  size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

 private:
  std::function<LightField(size_t)> loader_;
  size_t count_ = 0;
  size_t capacity_ = 0;
  std::list<std::pair<size_t, std::shared_ptr<LightField>>> cache_;
};

struct TrainResult {
  long final_step = 0;
  double last_loss = 0.0;
  double best_val_psnr = 0.0;
  std::filesystem::path latest_checkpoint;
  std::filesystem::path best_checkpoint;
};

// Optimization loop: per step, sample a batch of (corner views, random
// interior target, ground-truth view), run the pipeline up to the
// pre-unflip prediction, and minimize the total loss with Adam. Emits a
// loss CSV (step, total, final term, warp term), a `latest` checkpoint at
// the configured cadence and a `best` checkpoint tracked by validation
// PSNR. Deterministic for a fixed seed up to the platform's floating-point
// reduction order.
class Trainer {
 public:
  Trainer(TrainConfig cfg, ScenePool train_scenes, ScenePool val_scenes,
          std::filesystem::path out_dir);

  void init_model(uint64_t model_seed);
  void resume(const std::filesystem::path& checkpoint_path);

  // Runs until cfg.steps. Throws NumericError (after writing a diagnostic
  // checkpoint) if the loss goes non-finite.
  TrainResult run(bool echo_progress = false);

  nn::Model<float>& model() { return model_; }
  long step() const { return step_; }

 private:
  void save_checkpoint_file(const std::filesystem::path& path);
  double validation_psnr();

  TrainConfig cfg_;
  ScenePool train_;
  ScenePool val_;
  std::filesystem::path out_dir_;
  nn::Model<float> model_;
  nn::Adam<float> optimizer_;
  long step_ = 0;
  double best_val_ = -1.0;
};

}  // namespace lfvs
