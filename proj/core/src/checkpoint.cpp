#include "lfvs/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace lfvs {

namespace {

constexpr char kMagic[8] = {'L', 'F', 'V', 'S', 'C', 'K', 'P', '1'};

using json = nlohmann::json;

json hyperparams_to_json(const nn::ModelHyperparams& hp) {
  return json{{"n_resgroups", hp.n_resgroups},
              {"n_cbam_per_group", hp.n_cbam_per_group},
              {"attention", hp.attention},
              {"fe_channels", hp.fe_channels},
              {"fd_hidden", hp.fd_hidden},
              {"refine_width", hp.refine_width},
              {"ca_reduction", hp.ca_reduction},
              {"fe_branch_tap", hp.fe_branch_tap}};
}

nn::ModelHyperparams hyperparams_from_json(const json& j) {
  nn::ModelHyperparams hp;
  hp.n_resgroups = j.at("n_resgroups").get<int>();
  hp.n_cbam_per_group = j.at("n_cbam_per_group").get<int>();
  hp.attention = j.at("attention").get<bool>();
  hp.fe_channels = j.at("fe_channels").get<int>();
  hp.fd_hidden = j.at("fd_hidden").get<int>();
  hp.refine_width = j.at("refine_width").get<int>();
  hp.ca_reduction = j.at("ca_reduction").get<int>();
  hp.fe_branch_tap = j.at("fe_branch_tap").get<int>();
  return hp;
}

json tensor_index(const std::map<std::string, Tensor<double>>& tensors) {
  json arr = json::array();
  for (const auto& [name, t] : tensors)
    arr.push_back(json{{"name", name}, {"shape", t.shape()}});
  return arr;
}

void write_blobs(std::ofstream& out, const std::map<std::string, Tensor<double>>& tensors) {
  for (const auto& [name, t] : tensors)
    out.write(reinterpret_cast<const char*>(t.data()),
              std::streamsize(t.numel()) * std::streamsize(sizeof(double)));
}

void read_blobs(std::ifstream& in, const json& index,
                std::map<std::string, Tensor<double>>& tensors,
                const std::string& origin) {
  for (const auto& e : index) {
    const std::string name = e.at("name").get<std::string>();
    Tensor<double> t(e.at("shape").get<std::vector<int>>());
    in.read(reinterpret_cast<char*>(t.data()),
            std::streamsize(t.numel()) * std::streamsize(sizeof(double)));
    require_data(bool(in), "truncated checkpoint: " + origin);
    tensors[name] = std::move(t);
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  json header{{"version", 1},
              {"hyperparams", hyperparams_to_json(ckpt.hyperparams)},
              {"step", ckpt.step},
              {"meta", ckpt.meta},
              {"tensors", tensor_index(ckpt.tensors)},
              {"optimizer", tensor_index(ckpt.optimizer_state)}};
  const std::string htext = header.dump();

  std::ofstream out(path, std::ios::binary);
  require_data(bool(out), "cannot write checkpoint: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const uint64_t hlen = htext.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(htext.data(), std::streamsize(htext.size()));
  write_blobs(out, ckpt.tensors);
  write_blobs(out, ckpt.optimizer_state);
  require_data(bool(out), "short write on checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require_data(bool(in), "cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  require_data(bool(in) && std::equal(magic, magic + 8, kMagic),
               "not a checkpoint file: " + path.string());
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string htext(hlen, '\0');
  in.read(htext.data(), std::streamsize(hlen));
  require_data(bool(in), "truncated checkpoint header: " + path.string());

  json header = json::parse(htext, nullptr, false);
  require_data(!header.is_discarded(), "corrupt checkpoint header: " + path.string());
  require_data(header.at("version").get<int>() == 1,
               "unsupported checkpoint version in " + path.string());

  Checkpoint ckpt;
  ckpt.hyperparams = hyperparams_from_json(header.at("hyperparams"));
  ckpt.step = header.at("step").get<long>();
  ckpt.meta = header.at("meta").get<std::map<std::string, std::string>>();
  read_blobs(in, header.at("tensors"), ckpt.tensors, path.string());
  read_blobs(in, header.at("optimizer"), ckpt.optimizer_state, path.string());
  return ckpt;
}

}  // namespace lfvs
