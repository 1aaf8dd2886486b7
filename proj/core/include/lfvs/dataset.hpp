#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lfvs/light_field.hpp"

namespace lfvs {

// On-disk dataset description. Two layouts are supported:
//  - view_dirs: one directory per scene with view_<v>_<u>.png files;
//  - lenslet_grid: one PNG per scene where each n_v x n_u block of pixels
//    holds the angular samples of one spatial position (macro-pixel order,
//    view (v,u) at packed pixel (y*n_v+v, x*n_u+u)).
// Ingestion always ends with a centered angular crop (default 7x7).
struct DatasetSpec {
  std::filesystem::path root;
  enum class Layout { view_dirs, lenslet_grid } layout = Layout::view_dirs;
  int crop_nv = 7;
  int crop_nu = 7;
};

std::vector<std::string> list_scenes(const DatasetSpec& spec);

LightField load_lightfield(const DatasetSpec& spec, const std::string& scene_id);

// Unpacks a macro-pixel lenslet image into sub-aperture views.
LightField unpack_lenslet_grid(const Tensor<float>& packed, int n_v, int n_u);

struct SplitResult {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

// Deterministic for a fixed seed; splits are disjoint and exhaustive.
SplitResult split_dataset(const std::vector<std::string>& scene_ids, int test_count,
                          uint64_t seed);

// Plain-text manifests, one scene id per line.
void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::string>& ids);
std::vector<std::string> read_manifest(const std::filesystem::path& path);

}  // namespace lfvs
