#pragma once

#include <optional>
#include <string>

#include "lfvs/autograd.hpp"
#include "lfvs/geometry.hpp"

namespace lfvs::nn {

// Architecture knobs. The feature extractor is fixed at six convolutions
// with two pooled multi-scale branches; widths, the refinement depth, and
// the branch tap point are configurable. Defaults give the full model;
// tests shrink the widths.
struct ModelHyperparams {
  int n_resgroups = 5;
  int n_cbam_per_group = 3;
  bool attention = true;   // false replaces each CBAM with a plain residual block
  int fe_channels = 32;    // feature extractor width and feature volume channels
  int fd_hidden = 64;      // disparity network hidden width
  int refine_width = 64;   // refinement network width
  int ca_reduction = 16;   // channel attention bottleneck ratio
  int fe_branch_tap = 2;   // trunk conv (1 or 2) feeding the pooled branches

  bool operator==(const ModelHyperparams&) const = default;

  int cbam_count() const { return n_resgroups * n_cbam_per_group; }

  void validate() const {
    require_data(n_resgroups > 0 && n_cbam_per_group > 0, "hyperparams: depth must be positive");
    require_data(fe_channels > 0 && fd_hidden > 0 && refine_width > 0,
                 "hyperparams: widths must be positive");
    require_data(ca_reduction > 0, "hyperparams: ca_reduction must be positive");
    require_data(fe_branch_tap == 1 || fe_branch_tap == 2,
                 "hyperparams: fe_branch_tap must be 1 or 2");
  }
};

template <typename T>
struct NamedParam {
  std::string name;
  Var<T> var;
};

template <typename T>
struct Conv {
  Var<T> w, b;
  int dilation = 1;

  static Conv create(int in_c, int out_c, int k, Rng& rng, int dilation = 1) {
    Conv c;
    Tensor<T> wt({out_c, in_c, k, k});
    const double stddev = std::sqrt(2.0 / (double(in_c) * k * k));
    for (long i = 0; i < wt.numel(); ++i) wt[i] = T(stddev * rng.normal());
    c.w = make_param(std::move(wt));
    c.b = make_param(Tensor<T>({out_c}));
    c.dilation = dilation;
    return c;
  }

  Var<T> operator()(const Var<T>& x) const { return conv2d(x, w, b, dilation); }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) const {
    out.push_back({prefix + ".w", w});
    out.push_back({prefix + ".b", b});
  }
};

enum class PairRole { horz, vert, diag };

// Stereo feature extractor: six 3x3 convolutions with two average-pooled
// branches (16x16 and 8x8 windows) that are upsampled back to full extent
// and concatenated before the final two convolutions. One instance is
// shared by the horizontal and vertical pairs; the diagonal pair has its
// own parameters because it takes both coordinate planes.
template <typename T>
struct FeatureExtractor {
  Conv<T> conv1, conv2, conv3, conv4, conv5, conv6;
  int branch_tap = 2;

  static FeatureExtractor create(int in_c, int width, int branch_tap, Rng& rng) {
    FeatureExtractor fe;
    fe.conv1 = Conv<T>::create(in_c, width, 3, rng);
    fe.conv2 = Conv<T>::create(width, width, 3, rng);
    fe.conv3 = Conv<T>::create(width, width, 3, rng);
    fe.conv4 = Conv<T>::create(width, width, 3, rng);
    fe.conv5 = Conv<T>::create(3 * width, width, 3, rng);
    fe.conv6 = Conv<T>::create(width, width, 3, rng);
    fe.branch_tap = branch_tap;
    return fe;
  }

  Var<T> forward(const Var<T>& x) const {
    const int h = x->val.dim(1), w = x->val.dim(2);
    auto c1 = relu(conv1(x));
    auto c2 = relu(conv2(c1));
    const auto& tap = branch_tap == 1 ? c1 : c2;
    auto b16 = upsample_bilinear(relu(conv3(avg_pool(tap, 16))), h, w);
    auto b8 = upsample_bilinear(relu(conv4(avg_pool(tap, 8))), h, w);
    auto merged = concat_channels<T>({c2, b16, b8});
    return relu(conv6(relu(conv5(merged))));
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) const {
    conv1.collect(prefix + ".conv1", out);
    conv2.collect(prefix + ".conv2", out);
    conv3.collect(prefix + ".conv3", out);
    conv4.collect(prefix + ".conv4", out);
    conv5.collect(prefix + ".conv5", out);
    conv6.collect(prefix + ".conv6", out);
  }
};

// Disparity estimator: seven 3x3 convolutions, the first four dilated at
// rates 2, 4, 8, 16. Takes the three feature volumes plus the U and V
// planes; emits one signed disparity map per input view (linear output).
template <typename T>
struct DisparityNet {
  std::array<Conv<T>, 7> convs;

  static DisparityNet create(int in_c, int hidden, Rng& rng) {
    DisparityNet d;
    const int rates[7] = {2, 4, 8, 16, 1, 1, 1};
    int c_in = in_c;
    for (int i = 0; i < 7; ++i) {
      const int c_out = i == 6 ? 3 : hidden;
      d.convs[size_t(i)] = Conv<T>::create(c_in, c_out, 3, rng, rates[i]);
      c_in = c_out;
    }
    return d;
  }

  Var<T> forward(const Var<T>& x) const {
    Var<T> h = x;
    for (int i = 0; i < 6; ++i) h = relu(convs[size_t(i)](h));
    return convs[6](h);
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) const {
    for (size_t i = 0; i < convs.size(); ++i)
      convs[i].collect(prefix + ".conv" + std::to_string(i + 1), out);
  }
};

// Diagnostic capture of attention activations.
template <typename T>
struct AttentionMaps {
  Tensor<T> channel_gates;  // (C,1,1)
  Tensor<T> spatial_gate;   // (1,H,W)
};

template <typename T>
struct ChannelAttention {
  Conv<T> fc1, fc2;  // shared 1x1 bottleneck applied to both descriptors

  static ChannelAttention create(int channels, int reduction, Rng& rng) {
    ChannelAttention ca;
    const int hidden = std::max(1, channels / reduction);
    ca.fc1 = Conv<T>::create(channels, hidden, 1, rng);
    ca.fc2 = Conv<T>::create(hidden, channels, 1, rng);
    return ca;
  }

  Var<T> gates(const Var<T>& x) const {
    auto a = fc2(relu(fc1(global_avg_pool(x))));
    auto m = fc2(relu(fc1(global_max_pool(x))));
    return sigmoid(add(a, m));
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) const {
    fc1.collect(prefix + ".fc1", out);
    fc2.collect(prefix + ".fc2", out);
  }
};

template <typename T>
struct SpatialAttention {
  Conv<T> conv;  // 7x7 over [channel-mean, channel-max]

  static SpatialAttention create(Rng& rng) {
    SpatialAttention sa;
    sa.conv = Conv<T>::create(2, 1, 7, rng);
    return sa;
  }

  Var<T> gate(const Var<T>& x) const {
    return sigmoid(conv(concat_channels<T>({channel_mean(x), channel_max(x)})));
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) const {
    conv.collect(prefix + ".conv", out);
  }
};

// CBAM: conv-ReLU-conv, channel attention, spatial attention, residual add.
// With attention disabled this degenerates to a plain residual block.
template <typename T>
struct CbamBlock {
  Conv<T> conv1, conv2;
  std::optional<ChannelAttention<T>> ca;
  std::optional<SpatialAttention<T>> sa;

  static CbamBlock create(int width, int ca_reduction, bool attention, Rng& rng) {
    CbamBlock b;
    b.conv1 = Conv<T>::create(width, width, 3, rng);
    b.conv2 = Conv<T>::create(width, width, 3, rng);
    if (attention) {
      b.ca = ChannelAttention<T>::create(width, ca_reduction, rng);
      b.sa = SpatialAttention<T>::create(rng);
    }
    return b;
  }

  Var<T> forward(const Var<T>& x, std::vector<AttentionMaps<T>>* probe) const {
    auto y = conv2(relu(conv1(x)));
    AttentionMaps<T> maps;
    if (ca) {
      auto g = ca->gates(y);
      if (probe) maps.channel_gates = g->val;
      y = scale_channels(y, g);
    }
    if (sa) {
      auto g = sa->gate(y);
      if (probe) maps.spatial_gate = g->val;
      y = scale_spatial(y, g);
    }
    if (probe && (ca || sa)) probe->push_back(std::move(maps));
    return add(x, y);
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) const {
    conv1.collect(prefix + ".conv1", out);
    conv2.collect(prefix + ".conv2", out);
    if (ca) ca->collect(prefix + ".ca", out);
    if (sa) sa->collect(prefix + ".sa", out);
  }
};

template <typename T>
struct ResGroup {
  std::vector<CbamBlock<T>> blocks;
  Conv<T> tail;

  static ResGroup create(int width, int n_blocks, int ca_reduction, bool attention,
                         Rng& rng) {
    ResGroup g;
    for (int i = 0; i < n_blocks; ++i)
      g.blocks.push_back(CbamBlock<T>::create(width, ca_reduction, attention, rng));
    g.tail = Conv<T>::create(width, width, 3, rng);
    return g;
  }

  Var<T> forward(const Var<T>& x, std::vector<AttentionMaps<T>>* probe) const {
    Var<T> y = x;
    for (const auto& b : blocks) y = b.forward(y, probe);
    return add(x, tail(y));
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) const {
    for (size_t i = 0; i < blocks.size(); ++i)
      blocks[i].collect(prefix + ".cbam" + std::to_string(i + 1), out);
    tail.collect(prefix + ".conv", out);
  }
};

// Residual refinement: head conv, ResGroups, tail conv producing an RGB
// residual that is added to the average of the warped views.
template <typename T>
struct Refinement {
  Conv<T> head;
  std::vector<ResGroup<T>> groups;
  Conv<T> tail;

  static Refinement create(const ModelHyperparams& hp, Rng& rng) {
    Refinement r;
    r.head = Conv<T>::create(9, hp.refine_width, 3, rng);
    for (int i = 0; i < hp.n_resgroups; ++i)
      r.groups.push_back(ResGroup<T>::create(hp.refine_width, hp.n_cbam_per_group,
                                             hp.ca_reduction, hp.attention, rng));
    r.tail = Conv<T>::create(hp.refine_width, 3, 3, rng);
    return r;
  }

  Var<T> forward(const Var<T>& warped9, std::vector<AttentionMaps<T>>* probe) const {
    auto h = relu(head(warped9));
    for (const auto& g : groups) h = g.forward(h, probe);
    return tail(h);
  }

  int cbam_count() const {
    int n = 0;
    for (const auto& g : groups) n += int(g.blocks.size());
    return n;
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) const {
    head.collect(prefix + ".head", out);
    for (size_t i = 0; i < groups.size(); ++i)
      groups[i].collect(prefix + ".group" + std::to_string(i + 1), out);
    tail.collect(prefix + ".tail", out);
  }
};

// Geometry-prepared inputs for one forward pass: flipped view triple in work
// range [-1,1], constant coordinate planes for the remapped target, and the
// normalized angular offsets of each view relative to the target.
template <typename T>
struct PreparedSample {
  std::array<Tensor<T>, 3> views;  // roles L, R, B
  Tensor<T> plane_u, plane_v;      // (1,H,W)
  std::array<T, 3> du{}, dv{};
};

template <typename T>
struct ForwardResult {
  Var<T> pred;                     // pre-unflip, work range
  std::array<Var<T>, 3> warped;    // work range
  Var<T> disparity;                // (3,H,W): D_L, D_R, D_B
};

template <typename T>
struct SynthesisResult {
  Tensor<T> image;                       // work range [-1,1], unflipped
  std::array<Tensor<T>, 3> warped;       // canonical (flipped) frame
  std::array<Tensor<T>, 3> disparity;    // (1,H,W) each
  ViewSelection<T> selection;
  std::vector<AttentionMaps<T>> attention;
};

template <typename T>
Tensor<T> to_work_range(const Tensor<T>& x01) {
  Tensor<T> out(x01.shape());
  for (long i = 0; i < out.numel(); ++i) out[i] = T(2) * x01[i] - T(1);
  return out;
}

template <typename T>
Tensor<T> from_work_range(const Tensor<T>& x, bool clamp01 = true) {
  Tensor<T> out(x.shape());
  for (long i = 0; i < out.numel(); ++i) {
    T v = (x[i] + T(1)) / T(2);
    if (clamp01) v = std::clamp(v, T(0), T(1));
    out[i] = v;
  }
  return out;
}

template <typename T>
class Model {
 public:
  Model() = default;

  static Model create(const ModelHyperparams& hp, uint64_t seed) {
    hp.validate();
    Model m;
    m.hp_ = hp;
    Rng rng(seed);
    m.fe_shared_ = FeatureExtractor<T>::create(7, hp.fe_channels, hp.fe_branch_tap, rng);
    m.fe_diag_ = FeatureExtractor<T>::create(8, hp.fe_channels, hp.fe_branch_tap, rng);
    m.fd_ = DisparityNet<T>::create(3 * hp.fe_channels + 2, hp.fd_hidden, rng);
    m.refine_ = Refinement<T>::create(hp, rng);
    return m;
  }

  const ModelHyperparams& hyperparams() const { return hp_; }
  int cbam_count() const { return refine_.cbam_count(); }

  std::vector<NamedParam<T>> parameters() const {
    std::vector<NamedParam<T>> out;
    fe_shared_.collect("fe_shared", out);
    fe_diag_.collect("fe_diag", out);
    fd_.collect("fd", out);
    refine_.collect("refine", out);
    return out;
  }

  long parameter_count() const {
    long n = 0;
    for (const auto& p : parameters()) n += p.var->val.numel();
    return n;
  }

  void zero_grad() const {
    for (const auto& p : parameters())
      if (!p.var->grad.empty()) p.var->grad.zero();
  }

  // Stereo feature extraction for one pair. The plane subset must match the
  // role: horz takes {U}, vert takes {V}, diag takes {U,V}. The vertical
  // pair is rotated 90 degrees counter-clockwise through the shared network
  // and the output volume rotated back.
  Var<T> extract_features(PairRole role, const Var<T>& a, const Var<T>& b,
                          const std::vector<Var<T>>& planes) const {
    switch (role) {
      case PairRole::horz:
        require(planes.size() == 1, "horz pair expects exactly the U plane");
        return fe_shared_.forward(concat_channels<T>({a, b, planes[0]}));
      case PairRole::vert: {
        require(planes.size() == 1, "vert pair expects exactly the V plane");
        auto stacked = concat_channels<T>({a, b, planes[0]});
        return rot90_cw(fe_shared_.forward(rot90_ccw(stacked)));
      }
      case PairRole::diag:
        require(planes.size() == 2, "diag pair expects the U and V planes");
        return fe_diag_.forward(concat_channels<T>({a, b, planes[0], planes[1]}));
    }
    throw Error("unknown pair role");
  }

  ForwardResult<T> run(const PreparedSample<T>& s,
                       std::vector<AttentionMaps<T>>* probe = nullptr) const {
    auto img_l = constant(s.views[kLeft]);
    auto img_r = constant(s.views[kRight]);
    auto img_b = constant(s.views[kBottom]);
    auto plane_u = constant(s.plane_u);
    auto plane_v = constant(s.plane_v);

    auto f_horz = extract_features(PairRole::horz, img_l, img_r, {plane_u});
    auto f_vert = extract_features(PairRole::vert, img_l, img_b, {plane_v});
    auto f_diag = extract_features(PairRole::diag, img_b, img_r, {plane_u, plane_v});

    auto disparity =
        fd_.forward(concat_channels<T>({f_horz, f_vert, f_diag, plane_u, plane_v}));

    ForwardResult<T> out;
    out.disparity = disparity;
    const std::array<Var<T>, 3> views = {img_l, img_r, img_b};
    for (int i = 0; i < 3; ++i)
      out.warped[size_t(i)] = warp(views[size_t(i)], slice_channels(disparity, i, 1),
                                   s.du[size_t(i)], s.dv[size_t(i)]);

    auto avg = average3(out.warped[0], out.warped[1], out.warped[2]);
    auto residual =
        refine_.forward(concat_channels<T>({out.warped[0], out.warped[1], out.warped[2]}),
                        probe);
    out.pred = add(residual, avg);
    return out;
  }

  // Builds the prepared sample for a selection whose views are in [0,1].
  static PreparedSample<T> prepare(const ViewSelection<T>& sel) {
    PreparedSample<T> s;
    const AngularGrid& g = sel.grid;
    const int h = sel.views[0].dim(1), w = sel.views[0].dim(2);
    for (int i = 0; i < 3; ++i) {
      s.views[size_t(i)] = to_work_range(sel.views[size_t(i)]);
      s.du[size_t(i)] = T(g.norm_u(sel.corners[size_t(i)].u) - g.norm_u(sel.remapped_target.u));
      s.dv[size_t(i)] = T(g.norm_v(sel.corners[size_t(i)].v) - g.norm_v(sel.remapped_target.v));
    }
    s.plane_u = make_plane<T>(T(g.norm_u(sel.remapped_target.u)), h, w);
    s.plane_v = make_plane<T>(T(g.norm_v(sel.remapped_target.v)), h, w);
    return s;
  }

  struct SynthesizeOptions {
    bool capture_attention = false;
    bool keep_diagnostics = false;
  };

  // Full pipeline from the four corner views (in [0,1]) to the synthesized
  // target view in work range. Inference only; no gradients are recorded.
  SynthesisResult<T> synthesize(const std::array<Tensor<T>, 4>& corners01,
                                const AngularGrid& grid, GridCoord target,
                                const SynthesizeOptions& opts = {}) const {
    NoGradGuard no_grad;
    SynthesisResult<T> out;
    out.selection = select_views_from_corners(corners01, grid, target);
    PreparedSample<T> s = prepare(out.selection);
    ForwardResult<T> fwd =
        run(s, opts.capture_attention ? &out.attention : nullptr);
    out.image = unflip(fwd.pred->val, out.selection);
    if (opts.keep_diagnostics) {
      for (int i = 0; i < 3; ++i) {
        out.warped[size_t(i)] = fwd.warped[size_t(i)]->val;
        out.disparity[size_t(i)] = Tensor<T>({1, s.views[0].dim(1), s.views[0].dim(2)});
        const long plane = out.disparity[size_t(i)].numel();
        std::copy(fwd.disparity->val.data() + i * plane,
                  fwd.disparity->val.data() + (i + 1) * plane,
                  out.disparity[size_t(i)].data());
      }
    }
    return out;
  }

  FeatureExtractor<T>& fe_shared() { return fe_shared_; }
  FeatureExtractor<T>& fe_diag() { return fe_diag_; }
  DisparityNet<T>& disparity_net() { return fd_; }
  Refinement<T>& refinement() { return refine_; }
  const Refinement<T>& refinement() const { return refine_; }

 private:
  ModelHyperparams hp_;
  FeatureExtractor<T> fe_shared_;
  FeatureExtractor<T> fe_diag_;
  DisparityNet<T> fd_;
  Refinement<T> refine_;
};

}  // namespace lfvs::nn
