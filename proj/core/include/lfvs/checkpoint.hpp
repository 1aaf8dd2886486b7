#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "lfvs/networks.hpp"

namespace lfvs {

// Versioned checkpoint container: all parameter groups (stored as f64, so
// float params round-trip exactly), the architecture hyperparameters needed
// to rebuild the model, optimizer state, and free-form metadata.
struct Checkpoint {
  nn::ModelHyperparams hyperparams;
  long step = 0;
  std::map<std::string, Tensor<double>> tensors;          // model parameters
  std::map<std::string, Tensor<double>> optimizer_state;  // adam moments, keyed m./v.
  std::map<std::string, std::string> meta;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

template <typename T>
Checkpoint snapshot_model(const nn::Model<T>& model) {
  Checkpoint ckpt;
  ckpt.hyperparams = model.hyperparams();
  for (const auto& p : model.parameters())
    ckpt.tensors[p.name] = p.var->val.template cast<double>();
  return ckpt;
}

// Loads parameters into an existing model; shapes and names must match the
// model built from the checkpoint's hyperparameters.
template <typename T>
void restore_model(nn::Model<T>& model, const Checkpoint& ckpt) {
  require_data(model.hyperparams() == ckpt.hyperparams,
               "checkpoint/architecture mismatch");
  for (const auto& p : model.parameters()) {
    auto it = ckpt.tensors.find(p.name);
    require_data(it != ckpt.tensors.end(), "checkpoint missing tensor " + p.name);
    require_data(it->second.shape() == p.var->val.shape(),
                 "checkpoint tensor shape mismatch for " + p.name);
    p.var->val = it->second.template cast<T>();
  }
}

template <typename T>
nn::Model<T> model_from_checkpoint(const Checkpoint& ckpt) {
  auto model = nn::Model<T>::create(ckpt.hyperparams, 0);
  restore_model(model, ckpt);
  return model;
}

}  // namespace lfvs
