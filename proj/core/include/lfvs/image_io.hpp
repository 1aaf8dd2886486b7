#pragma once

#include <filesystem>

#include "lfvs/tensor.hpp"

namespace lfvs {

// 8-bit PNG <-> float CHW RGB in [0,1]. Decoding maps sample k to k/255,
// encoding rounds x*255 to the nearest integer, so an 8-bit round trip is
// lossless.
Tensor<float> read_png_rgb(const std::filesystem::path& path);
void write_png_rgb(const std::filesystem::path& path, const Tensor<float>& rgb01);

// Single-channel 8-bit PNG from a (1,H,W) tensor in [0,1].
void write_png_gray(const std::filesystem::path& path, const Tensor<float>& gray01);

// PFM, grayscale ("Pf"), little-endian, bottom-up scanline order. Used for
// floating-point disparity maps; round trips float32 exactly.
Tensor<float> read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const Tensor<float>& map);

}  // namespace lfvs
