#include "lfvs/light_field.hpp"

#include <regex>

#include "lfvs/image_io.hpp"

namespace lfvs {

LightField::LightField(int nv, int nu, int h, int w)
    : n_v(nv), n_u(nu), height(h), width(w) {
  require(nv > 0 && nu > 0 && h > 0 && w > 0, "LightField: extents must be positive");
  views.assign(size_t(nv) * size_t(nu), Tensor<float>({3, h, w}));
}

Tensor<float>& LightField::view(int v, int u) {
  require(in_grid(v, u), "view index out of grid");
  return views[size_t(v) * size_t(n_u) + size_t(u)];
}

const Tensor<float>& LightField::view(int v, int u) const {
  require(in_grid(v, u), "view index out of grid");
  return views[size_t(v) * size_t(n_u) + size_t(u)];
}

LightField LightField::crop_spatial(int y0, int x0, int h, int w) const {
  require(y0 >= 0 && x0 >= 0 && y0 + h <= height && x0 + w <= width,
          "crop_spatial: window outside frame");
  LightField out(n_v, n_u, h, w);
  for (size_t i = 0; i < views.size(); ++i) {
    const Tensor<float>& src = views[i];
    Tensor<float>& dst = out.views[i];
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) dst.at(c, y, x) = src.at(c, y0 + y, x0 + x);
  }
  return out;
}

void LightField::validate() const {
  require_data(int(views.size()) == n_v * n_u,
               "light-field view count does not match angular extent");
  for (const auto& v : views) {
    require_data(v.rank() == 3 && v.dim(0) == 3, "view must be (3,H,W)");
    require_data(v.height() == height && v.width() == width,
                 "inconsistent view dimensions");
  }
}

std::filesystem::path view_filename(int v, int u) {
  return "view_" + std::to_string(v) + "_" + std::to_string(u) + ".png";
}

void write_lightfield(const std::filesystem::path& scene_dir, const LightField& lf) {
  std::filesystem::create_directories(scene_dir);
  for (int v = 0; v < lf.n_v; ++v)
    for (int u = 0; u < lf.n_u; ++u)
      write_png_rgb(scene_dir / view_filename(v, u), lf.view(v, u));
}

LightField read_lightfield_dir(const std::filesystem::path& scene_dir) {
  require_data(std::filesystem::is_directory(scene_dir),
               "scene directory not found: " + scene_dir.string());
  // Infer the captured angular extent from the files present.
  int max_v = -1, max_u = -1;
  const std::regex pat(R"(view_(\d+)_(\d+)\.png)");
  for (const auto& e : std::filesystem::directory_iterator(scene_dir)) {
    std::smatch m;
    const std::string name = e.path().filename().string();
    if (std::regex_match(name, m, pat)) {
      max_v = std::max(max_v, std::stoi(m[1]));
      max_u = std::max(max_u, std::stoi(m[2]));
    }
  }
  require_data(max_v >= 0 && max_u >= 0,
               "no view_<v>_<u>.png files in " + scene_dir.string());

  const int n_v = max_v + 1, n_u = max_u + 1;
  LightField lf;
  lf.n_v = n_v;
  lf.n_u = n_u;
  lf.views.reserve(size_t(n_v) * size_t(n_u));
  for (int v = 0; v < n_v; ++v) {
    for (int u = 0; u < n_u; ++u) {
      const auto path = scene_dir / view_filename(v, u);
      require_data(std::filesystem::exists(path),
                   "missing view (" + std::to_string(v) + "," + std::to_string(u) +
                       "): " + path.string());
      Tensor<float> img = read_png_rgb(path);
      if (v == 0 && u == 0) {
        lf.height = img.height();
        lf.width = img.width();
      } else {
        require_data(img.height() == lf.height && img.width() == lf.width,
                     "inconsistent view dimensions at (" + std::to_string(v) + "," +
                         std::to_string(u) + "): " + path.string());
      }
      lf.views.push_back(std::move(img));
    }
  }
  return lf;
}

int central_crop_start(int capture_extent, int crop_extent) {
  require_data(crop_extent > 0 && crop_extent <= capture_extent,
               "angular crop larger than capture");
  return (capture_extent - crop_extent + 1) / 2;
}

LightField crop_angular(const LightField& lf, int crop_nv, int crop_nu) {
  const int v0 = central_crop_start(lf.n_v, crop_nv);
  const int u0 = central_crop_start(lf.n_u, crop_nu);
  LightField out;
  out.n_v = crop_nv;
  out.n_u = crop_nu;
  out.height = lf.height;
  out.width = lf.width;
  out.color_space = lf.color_space;
  out.views.reserve(size_t(crop_nv) * size_t(crop_nu));
  for (int v = 0; v < crop_nv; ++v)
    for (int u = 0; u < crop_nu; ++u) out.views.push_back(lf.view(v0 + v, u0 + u));
  return out;
}

}  // namespace lfvs
