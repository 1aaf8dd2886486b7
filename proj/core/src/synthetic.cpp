#include "lfvs/synthetic.hpp"

#include <cmath>

namespace lfvs {

namespace {

struct Wave {
  int kx, ky;
  double amp, phase;
};

struct TextureParams {
  double base[3];
  std::vector<Wave> waves[3];
};

// Texture parameters are a pure function of the layer seed, so repeated
// evaluations (generator, tests, per-layer rendering) agree exactly.
TextureParams make_texture(uint64_t seed, int n_waves) {
  TextureParams tp;
  Rng rng(seed);
  for (int c = 0; c < 3; ++c) {
    tp.base[c] = rng.uniform(0.35, 0.65);
    const double headroom =
        std::min(tp.base[c], 1.0 - tp.base[c]) - 0.05;  // keep values in [0,1]
    std::vector<double> w(size_t(n_waves));
    double sum = 0.0;
    for (auto& x : w) {
      x = rng.uniform(0.2, 1.0);
      sum += x;
    }
    for (int j = 0; j < n_waves; ++j) {
      Wave wave;
      do {
        wave.kx = int(rng.uniform_int(9)) - 4;
        wave.ky = int(rng.uniform_int(9)) - 4;
      } while (wave.kx == 0 && wave.ky == 0);
      wave.amp = headroom * w[size_t(j)] / sum;
      wave.phase = rng.uniform(0.0, 2.0 * M_PI);
      tp.waves[c].push_back(wave);
    }
  }
  return tp;
}

double eval_texture(const TextureParams& tp, int c, double x, double y, int w,
                    int h) {
  double v = tp.base[c];
  for (const Wave& wave : tp.waves[c])
    v += wave.amp *
         std::sin(2.0 * M_PI * (wave.kx * x / w + wave.ky * y / h) + wave.phase);
  return v;
}

bool ellipse_covers(const SyntheticLayer& l, double x, double y, int w, int h) {
  if (l.is_background) return true;
  const double dx = std::remainder(x - l.cx, double(w));
  const double dy = std::remainder(y - l.cy, double(h));
  const double nx = dx / l.rx, ny = dy / l.ry;
  return nx * nx + ny * ny <= 1.0;
}

}  // namespace

void SyntheticSceneSpec::validate() const {
  require_data(n_v > 0 && n_u > 0 && height > 0 && width > 0,
               "synthetic spec: extents must be positive");
  require_data(!layers.empty(), "synthetic spec: at least one layer required");
  require_data(layers.back().is_background,
               "synthetic spec: last layer must be a background");
  const double max_offset = double(std::max(n_v, n_u) - 1);
  const double limit = std::min(height, width) / 4.0;
  for (const auto& l : layers) {
    require_data(std::isfinite(l.disparity), "synthetic spec: disparity not finite");
    require_data(std::abs(l.disparity) * max_offset < limit,
                 "synthetic spec: |disparity| * max angular offset must stay below "
                 "min(height,width)/4");
    if (!l.is_background)
      require_data(l.rx > 0 && l.ry > 0, "synthetic spec: ellipse radii must be positive");
  }
}

double layer_texture_value(const SyntheticSceneSpec& spec, int layer, int channel,
                           double x, double y) {
  const TextureParams tp =
      make_texture(spec.layers[size_t(layer)].texture_seed, spec.texture_waves);
  return eval_texture(tp, channel, x, y, spec.width, spec.height);
}

bool layer_covers(const SyntheticSceneSpec& spec, int layer, double x, double y) {
  return ellipse_covers(spec.layers[size_t(layer)], x, y, spec.width, spec.height);
}

Tensor<float> render_layer_view(const SyntheticSceneSpec& spec, int layer, int v,
                                int u) {
  const SyntheticLayer& l = spec.layers[size_t(layer)];
  const TextureParams tp = make_texture(l.texture_seed, spec.texture_waves);
  Tensor<float> img({3, spec.height, spec.width});
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x)
        img.at(c, y, x) = float(eval_texture(tp, c, x - u * l.disparity,
                                             y - v * l.disparity, spec.width,
                                             spec.height));
  return img;
}

SyntheticScene generate_synthetic(const SyntheticSceneSpec& spec) {
  spec.validate();
  SyntheticScene scene;
  scene.lf = LightField(spec.n_v, spec.n_u, spec.height, spec.width);
  scene.gt_disparity.assign(size_t(spec.n_v) * size_t(spec.n_u),
                            Tensor<float>({1, spec.height, spec.width}));
  scene.layer_ids.assign(size_t(spec.n_v) * size_t(spec.n_u),
                         Tensor<int>({1, spec.height, spec.width}));

  std::vector<TextureParams> textures;
  textures.reserve(spec.layers.size());
  for (const auto& l : spec.layers)
    textures.push_back(make_texture(l.texture_seed, spec.texture_waves));

  for (int v = 0; v < spec.n_v; ++v) {
    for (int u = 0; u < spec.n_u; ++u) {
      Tensor<float>& img = scene.lf.view(v, u);
      Tensor<float>& disp = scene.gt_disparity[size_t(v) * size_t(spec.n_u) + u];
      Tensor<int>& ids = scene.layer_ids[size_t(v) * size_t(spec.n_u) + u];
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          int hit = -1;
          double lx = 0.0, ly = 0.0;
          for (size_t li = 0; li < spec.layers.size(); ++li) {
            const SyntheticLayer& l = spec.layers[li];
            lx = x - u * l.disparity;
            ly = y - v * l.disparity;
            if (ellipse_covers(l, lx, ly, spec.width, spec.height)) {
              hit = int(li);
              break;
            }
          }
          const SyntheticLayer& l = spec.layers[size_t(hit)];
          for (int c = 0; c < 3; ++c)
            img.at(c, y, x) = float(
                eval_texture(textures[size_t(hit)], c, lx, ly, spec.width, spec.height));
          disp.at(0, y, x) = float(l.disparity);
          ids.at(0, y, x) = hit;
        }
      }
    }
  }
  return scene;
}

SyntheticDistribution SyntheticDistribution::from_config(const Config& cfg) {
  SyntheticDistribution d;
  d.n_v = int(cfg.get_int("n_v", d.n_v));
  d.n_u = int(cfg.get_int("n_u", d.n_u));
  d.height = int(cfg.get_int("height", d.height));
  d.width = int(cfg.get_int("width", d.width));
  d.texture_waves = int(cfg.get_int("texture_waves", d.texture_waves));
  d.foreground_layers = int(cfg.get_int("foreground_layers", d.foreground_layers));
  d.disparity_min = cfg.get_double("disparity_min", d.disparity_min);
  d.disparity_max = cfg.get_double("disparity_max", d.disparity_max);
  d.integer_disparities = cfg.get_bool("integer_disparities", d.integer_disparities);
  require_data(d.disparity_min <= d.disparity_max,
               "synthetic distribution: disparity_min > disparity_max");
  return d;
}

SyntheticSceneSpec SyntheticDistribution::sample(uint64_t scene_seed) const {
  Rng rng(scene_seed);
  SyntheticSceneSpec spec;
  spec.n_v = n_v;
  spec.n_u = n_u;
  spec.height = height;
  spec.width = width;
  spec.texture_waves = texture_waves;

  auto draw_disparity = [&]() {
    if (integer_disparities) {
      const long lo = long(std::ceil(disparity_min));
      const long hi = long(std::floor(disparity_max));
      return double(lo + long(rng.uniform_int(uint64_t(hi - lo + 1))));
    }
    return rng.uniform(disparity_min, disparity_max);
  };

  for (int i = 0; i < foreground_layers; ++i) {
    SyntheticLayer l;
    l.disparity = draw_disparity();
    l.texture_seed = rng.next_u64();
    l.cx = rng.uniform(0.0, double(width));
    l.cy = rng.uniform(0.0, double(height));
    l.rx = rng.uniform(0.12, 0.3) * width;
    l.ry = rng.uniform(0.12, 0.3) * height;
    spec.layers.push_back(l);
  }
  SyntheticLayer bg;
  bg.is_background = true;
  bg.disparity = draw_disparity();
  bg.texture_seed = rng.next_u64();
  spec.layers.push_back(bg);
  spec.validate();
  return spec;
}

}  // namespace lfvs
