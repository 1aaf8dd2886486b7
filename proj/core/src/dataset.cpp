#include "lfvs/dataset.hpp"

#include <algorithm>
#include <fstream>

#include "lfvs/common.hpp"
#include "lfvs/image_io.hpp"

namespace lfvs {

std::vector<std::string> list_scenes(const DatasetSpec& spec) {
  require_data(std::filesystem::is_directory(spec.root),
               "dataset root not found: " + spec.root.string());
  std::vector<std::string> ids;
  for (const auto& e : std::filesystem::directory_iterator(spec.root)) {
    if (spec.layout == DatasetSpec::Layout::view_dirs) {
      if (e.is_directory()) ids.push_back(e.path().filename().string());
    } else {
      if (e.is_regular_file() && e.path().extension() == ".png")
        ids.push_back(e.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

LightField load_lightfield(const DatasetSpec& spec, const std::string& scene_id) {
  LightField captured;
  if (spec.layout == DatasetSpec::Layout::view_dirs) {
    captured = read_lightfield_dir(spec.root / scene_id);
  } else {
    const auto path = spec.root / (scene_id + ".png");
    require_data(std::filesystem::exists(path), "missing scene: " + path.string());
    // The packed angular extent equals the requested crop source; lenslet
    // files carry the full capture, conventionally 14x14.
    Tensor<float> packed = read_png_rgb(path);
    int n_v = 14, n_u = 14;
    require_data(packed.height() % n_v == 0 && packed.width() % n_u == 0,
                 "packed lenslet image extent not divisible by 14: " + path.string());
    captured = unpack_lenslet_grid(packed, n_v, n_u);
  }
  captured.validate();
  require_data(spec.crop_nv <= captured.n_v && spec.crop_nu <= captured.n_u,
               "angular crop " + std::to_string(spec.crop_nv) + "x" +
                   std::to_string(spec.crop_nu) + " exceeds capture " +
                   std::to_string(captured.n_v) + "x" + std::to_string(captured.n_u));
  return crop_angular(captured, spec.crop_nv, spec.crop_nu);
}

LightField unpack_lenslet_grid(const Tensor<float>& packed, int n_v, int n_u) {
  require_data(packed.height() % n_v == 0 && packed.width() % n_u == 0,
               "packed image extent not divisible by angular extent");
  const int h = packed.height() / n_v;
  const int w = packed.width() / n_u;
  LightField lf(n_v, n_u, h, w);
  for (int v = 0; v < n_v; ++v)
    for (int u = 0; u < n_u; ++u) {
      Tensor<float>& dst = lf.view(v, u);
      for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x)
            dst.at(c, y, x) = packed.at(c, y * n_v + v, x * n_u + u);
    }
  return lf;
}

SplitResult split_dataset(const std::vector<std::string>& scene_ids, int test_count,
                          uint64_t seed) {
  require_data(test_count >= 0 && size_t(test_count) <= scene_ids.size(),
               "requested test count exceeds scene count");
  std::vector<std::string> ids = scene_ids;
  std::sort(ids.begin(), ids.end());  // independent of listing order
  Rng rng(seed);
  rng.shuffle(ids);
  SplitResult out;
  out.test_ids.assign(ids.begin(), ids.begin() + test_count);
  out.train_ids.assign(ids.begin() + test_count, ids.end());
  std::sort(out.test_ids.begin(), out.test_ids.end());
  std::sort(out.train_ids.begin(), out.train_ids.end());
  return out;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::string>& ids) {
  std::ofstream out(path);
  require_data(bool(out), "cannot write manifest: " + path.string());
  for (const auto& id : ids) out << id << "\n";
}

std::vector<std::string> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require_data(bool(in), "cannot read manifest: " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

}  // namespace lfvs
