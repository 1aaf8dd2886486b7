#pragma once

#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "lfvs/conv_kernels.hpp"
#include "lfvs/geometry.hpp"
#include "lfvs/tensor.hpp"

namespace lfvs::nn {

// Minimal define-by-run reverse-mode tape over Tensor<T>. Each op returns a
// node holding the forward value; when gradients are enabled the node keeps
// shared ownership of its parents plus a closure that scatters its gradient
// into theirs. Graphs are built per forward pass and freed when the root
// goes out of scope.

template <typename T>
struct Node {
  Tensor<T> val;
  Tensor<T> grad;  // allocated lazily
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;

  explicit Node(Tensor<T> v, bool rg = false) : val(std::move(v)), requires_grad(rg) {}

  Tensor<T>& ensure_grad() {
    if (grad.empty()) grad = Tensor<T>(val.shape());
    return grad;
  }
};

template <typename T>
using Var = std::shared_ptr<Node<T>>;

// Gradient recording is on by default; inference wraps calls in NoGradGuard
// so intermediate values are released as soon as they go out of scope.
inline bool& grad_mode_flag() {
  thread_local bool enabled = true;
  return enabled;
}
inline bool grad_enabled() { return grad_mode_flag(); }

struct NoGradGuard {
  bool prev;
  NoGradGuard() : prev(grad_mode_flag()) { grad_mode_flag() = false; }
  ~NoGradGuard() { grad_mode_flag() = prev; }
};

template <typename T>
Var<T> constant(Tensor<T> t) {
  return std::make_shared<Node<T>>(std::move(t), false);
}

template <typename T>
Var<T> make_param(Tensor<T> t) {
  return std::make_shared<Node<T>>(std::move(t), true);
}

namespace detail {

template <typename T>
bool track(std::initializer_list<Var<T>> parents) {
  if (!grad_enabled()) return false;
  for (const auto& p : parents)
    if (p && p->requires_grad) return true;
  return false;
}

template <typename T>
Var<T> make_op(Tensor<T> value, std::initializer_list<Var<T>> parents,
               std::function<void(Node<T>&)> backprop) {
  auto node = std::make_shared<Node<T>>(std::move(value));
  if (track<T>(parents)) {
    node->requires_grad = true;
    node->parents.assign(parents);
    node->backprop = std::move(backprop);
  }
  return node;
}

}  // namespace detail

// Runs reverse accumulation from a scalar root. Parent gradients are summed
// over all uses; parameter gradients accumulate across calls until cleared.
template <typename T>
void backward(const Var<T>& root) {
  require(root->val.numel() == 1, "backward: root must be scalar");
  if (!root->requires_grad) return;

  // Reverse post-order: every consumer runs before its producers.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  std::vector<std::pair<Node<T>*, size_t>> stack{{root.get(), 0}};
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Node<T>* p = node->parents[idx++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root->ensure_grad()[0] = T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (n->backprop && !n->grad.empty()) n->backprop(*n);
  }
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require(a->val.same_shape(b->val), "add: shape mismatch");
  Tensor<T> out(a->val.shape());
  for (long i = 0; i < out.numel(); ++i) out[i] = a->val[i] + b->val[i];
  return detail::make_op<T>(std::move(out), {a, b}, [a, b](Node<T>& n) {
    if (a->requires_grad) axpy(T(1), n.grad, a->ensure_grad());
    if (b->requires_grad) axpy(T(1), n.grad, b->ensure_grad());
  });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  require(a->val.same_shape(b->val), "sub: shape mismatch");
  Tensor<T> out(a->val.shape());
  for (long i = 0; i < out.numel(); ++i) out[i] = a->val[i] - b->val[i];
  return detail::make_op<T>(std::move(out), {a, b}, [a, b](Node<T>& n) {
    if (a->requires_grad) axpy(T(1), n.grad, a->ensure_grad());
    if (b->requires_grad) axpy(T(-1), n.grad, b->ensure_grad());
  });
}

template <typename T>
Var<T> average3(const Var<T>& a, const Var<T>& b, const Var<T>& c) {
  Tensor<T> out = lfvs::average3(a->val, b->val, c->val);
  return detail::make_op<T>(std::move(out), {a, b, c}, [a, b, c](Node<T>& n) {
    const T k = T(1) / T(3);
    if (a->requires_grad) axpy(k, n.grad, a->ensure_grad());
    if (b->requires_grad) axpy(k, n.grad, b->ensure_grad());
    if (c->requires_grad) axpy(k, n.grad, c->ensure_grad());
  });
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  Tensor<T> out(x->val.shape());
  for (long i = 0; i < out.numel(); ++i) out[i] = x->val[i] > T(0) ? x->val[i] : T(0);
  return detail::make_op<T>(std::move(out), {x}, [x](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    for (long i = 0; i < n.grad.numel(); ++i)
      if (x->val[i] > T(0)) dx[i] += n.grad[i];
  });
}

template <typename T>
Var<T> sigmoid(const Var<T>& x) {
  Tensor<T> out(x->val.shape());
  for (long i = 0; i < out.numel(); ++i) out[i] = T(1) / (T(1) + std::exp(-x->val[i]));
  return detail::make_op<T>(std::move(out), {x}, [x](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    for (long i = 0; i < n.grad.numel(); ++i) {
      const T s = n.val[i];
      dx[i] += n.grad[i] * s * (T(1) - s);
    }
  });
}

template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias,
              int dilation = 1) {
  Tensor<T> out = conv2d_forward(x->val, weight->val, bias->val, dilation);
  return detail::make_op<T>(std::move(out), {x, weight, bias},
                            [x, weight, bias, dilation](Node<T>& n) {
    conv2d_backward(x->val, weight->val, n.grad, dilation,
                    x->requires_grad ? &x->ensure_grad() : nullptr,
                    weight->requires_grad ? &weight->ensure_grad() : nullptr,
                    bias->requires_grad ? &bias->ensure_grad() : nullptr);
  });
}

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& parts) {
  require(!parts.empty(), "concat_channels: empty input");
  const int h = parts[0]->val.dim(1), w = parts[0]->val.dim(2);
  int total_c = 0;
  for (const auto& p : parts) {
    require(p->val.rank() == 3 && p->val.dim(1) == h && p->val.dim(2) == w,
            "concat_channels: extent mismatch");
    total_c += p->val.dim(0);
  }
  Tensor<T> out({total_c, h, w});
  long off = 0;
  for (const auto& p : parts) {
    std::copy(p->val.data(), p->val.data() + p->val.numel(), out.data() + off);
    off += p->val.numel();
  }
  auto node = std::make_shared<Node<T>>(std::move(out));
  bool needs = grad_enabled();
  if (needs) {
    bool any = false;
    for (const auto& p : parts) any = any || p->requires_grad;
    needs = any;
  }
  if (needs) {
    node->requires_grad = true;
    node->parents.assign(parts.begin(), parts.end());
    node->backprop = [parts](Node<T>& n) {
      long off2 = 0;
      for (const auto& p : parts) {
        if (p->requires_grad) {
          Tensor<T>& dp = p->ensure_grad();
          const T* g = n.grad.data() + off2;
          for (long i = 0; i < dp.numel(); ++i) dp[i] += g[i];
        }
        off2 += p->val.numel();
      }
    };
  }
  return node;
}

template <typename T>
Var<T> slice_channels(const Var<T>& x, int c0, int count) {
  require(c0 >= 0 && c0 + count <= x->val.dim(0), "slice_channels: out of range");
  const int h = x->val.dim(1), w = x->val.dim(2);
  Tensor<T> out({count, h, w});
  const long plane = long(h) * w;
  std::copy(x->val.data() + c0 * plane, x->val.data() + (c0 + count) * plane,
            out.data());
  return detail::make_op<T>(std::move(out), {x}, [x, c0, count, plane](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    T* dst = dx.data() + c0 * plane;
    for (long i = 0; i < count * plane; ++i) dst[i] += n.grad[i];
  });
}

// Average pooling with kernel k and stride k; border windows truncate at the
// frame and average over the samples they actually cover.
template <typename T>
Var<T> avg_pool(const Var<T>& x, int k) {
  const int cn = x->val.dim(0), h = x->val.dim(1), w = x->val.dim(2);
  const int oh = (h + k - 1) / k, ow = (w + k - 1) / k;
  Tensor<T> out({cn, oh, ow});
  for (int c = 0; c < cn; ++c)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        const int y0 = oy * k, y1 = std::min(y0 + k, h);
        const int x0 = ox * k, x1 = std::min(x0 + k, w);
        T acc = T(0);
        for (int y = y0; y < y1; ++y)
          for (int xx = x0; xx < x1; ++xx) acc += x->val.at(c, y, xx);
        out.at(c, oy, ox) = acc / T((y1 - y0) * (x1 - x0));
      }
  return detail::make_op<T>(std::move(out), {x}, [x, k, h, w, oh, ow, cn](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    for (int c = 0; c < cn; ++c)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          const int y0 = oy * k, y1 = std::min(y0 + k, h);
          const int x0 = ox * k, x1 = std::min(x0 + k, w);
          const T g = n.grad.at(c, oy, ox) / T((y1 - y0) * (x1 - x0));
          for (int y = y0; y < y1; ++y)
            for (int xx = x0; xx < x1; ++xx) dx.at(c, y, xx) += g;
        }
  });
}

namespace detail {

struct BilinearTap {
  int i0, i1;
  double f;
};

inline BilinearTap bilinear_tap(int out_i, int out_n, int in_n) {
  // Half-pixel mapping with edge clamping.
  const double scale = double(in_n) / double(out_n);
  double src = (out_i + 0.5) * scale - 0.5;
  if (src < 0.0) src = 0.0;
  if (src > in_n - 1) src = double(in_n - 1);
  BilinearTap t;
  t.i0 = int(src);
  if (t.i0 > in_n - 2) t.i0 = std::max(0, in_n - 2);
  t.i1 = std::min(t.i0 + 1, in_n - 1);
  t.f = src - t.i0;
  return t;
}

}  // namespace detail

template <typename T>
Var<T> upsample_bilinear(const Var<T>& x, int out_h, int out_w) {
  const int cn = x->val.dim(0), h = x->val.dim(1), w = x->val.dim(2);
  std::vector<detail::BilinearTap> ty(size_t(out_h)), tx(size_t(out_w));
  for (int y = 0; y < out_h; ++y) ty[size_t(y)] = detail::bilinear_tap(y, out_h, h);
  for (int xx = 0; xx < out_w; ++xx) tx[size_t(xx)] = detail::bilinear_tap(xx, out_w, w);
  Tensor<T> out({cn, out_h, out_w});
  for (int c = 0; c < cn; ++c)
    for (int y = 0; y < out_h; ++y) {
      const auto& a = ty[size_t(y)];
      for (int xx = 0; xx < out_w; ++xx) {
        const auto& b = tx[size_t(xx)];
        const T v00 = x->val.at(c, a.i0, b.i0), v01 = x->val.at(c, a.i0, b.i1);
        const T v10 = x->val.at(c, a.i1, b.i0), v11 = x->val.at(c, a.i1, b.i1);
        const T top = v00 + T(b.f) * (v01 - v00);
        const T bot = v10 + T(b.f) * (v11 - v10);
        out.at(c, y, xx) = top + T(a.f) * (bot - top);
      }
    }
  return detail::make_op<T>(std::move(out), {x},
                            [x, ty, tx, cn, out_h, out_w](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    for (int c = 0; c < cn; ++c)
      for (int y = 0; y < out_h; ++y) {
        const auto& a = ty[size_t(y)];
        for (int xx = 0; xx < out_w; ++xx) {
          const auto& b = tx[size_t(xx)];
          const T g = n.grad.at(c, y, xx);
          dx.at(c, a.i0, b.i0) += g * T((1 - a.f) * (1 - b.f));
          dx.at(c, a.i0, b.i1) += g * T((1 - a.f) * b.f);
          dx.at(c, a.i1, b.i0) += g * T(a.f * (1 - b.f));
          dx.at(c, a.i1, b.i1) += g * T(a.f * b.f);
        }
      }
  });
}

template <typename T>
Var<T> global_avg_pool(const Var<T>& x) {
  const int cn = x->val.dim(0);
  const long plane = long(x->val.dim(1)) * x->val.dim(2);
  Tensor<T> out({cn, 1, 1});
  for (int c = 0; c < cn; ++c) {
    const T* p = &x->val.at(c, 0, 0);
    T acc = T(0);
    for (long i = 0; i < plane; ++i) acc += p[i];
    out[c] = acc / T(plane);
  }
  return detail::make_op<T>(std::move(out), {x}, [x, cn, plane](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    for (int c = 0; c < cn; ++c) {
      const T g = n.grad[c] / T(plane);
      T* p = &dx.at(c, 0, 0);
      for (long i = 0; i < plane; ++i) p[i] += g;
    }
  });
}

template <typename T>
Var<T> global_max_pool(const Var<T>& x) {
  const int cn = x->val.dim(0);
  const long plane = long(x->val.dim(1)) * x->val.dim(2);
  Tensor<T> out({cn, 1, 1});
  std::vector<long> arg(size_t(cn));
  for (int c = 0; c < cn; ++c) {
    const T* p = &x->val.at(c, 0, 0);
    long best = 0;
    for (long i = 1; i < plane; ++i)
      if (p[i] > p[best]) best = i;
    arg[size_t(c)] = best;
    out[c] = p[best];
  }
  return detail::make_op<T>(std::move(out), {x}, [x, cn, plane, arg](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    for (int c = 0; c < cn; ++c) dx[c * plane + arg[size_t(c)]] += n.grad[c];
  });
}

template <typename T>
Var<T> channel_mean(const Var<T>& x) {
  const int cn = x->val.dim(0), h = x->val.dim(1), w = x->val.dim(2);
  const long plane = long(h) * w;
  Tensor<T> out({1, h, w});
  for (long i = 0; i < plane; ++i) {
    T acc = T(0);
    for (int c = 0; c < cn; ++c) acc += x->val[c * plane + i];
    out[i] = acc / T(cn);
  }
  return detail::make_op<T>(std::move(out), {x}, [x, cn, plane](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    for (long i = 0; i < plane; ++i) {
      const T g = n.grad[i] / T(cn);
      for (int c = 0; c < cn; ++c) dx[c * plane + i] += g;
    }
  });
}

template <typename T>
Var<T> channel_max(const Var<T>& x) {
  const int cn = x->val.dim(0), h = x->val.dim(1), w = x->val.dim(2);
  const long plane = long(h) * w;
  Tensor<T> out({1, h, w});
  std::vector<int> arg(size_t(plane));
  for (long i = 0; i < plane; ++i) {
    int best = 0;
    for (int c = 1; c < cn; ++c)
      if (x->val[c * plane + i] > x->val[best * plane + i]) best = c;
    arg[size_t(i)] = best;
    out[i] = x->val[best * plane + i];
  }
  return detail::make_op<T>(std::move(out), {x}, [x, plane, arg](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    for (long i = 0; i < plane; ++i) dx[arg[size_t(i)] * plane + i] += n.grad[i];
  });
}

// y[c] = x[c] * gates[c]; gates has shape (C,1,1).
template <typename T>
Var<T> scale_channels(const Var<T>& x, const Var<T>& gates) {
  const int cn = x->val.dim(0);
  require(gates->val.rank() == 3 && gates->val.dim(0) == cn &&
              gates->val.dim(1) == 1 && gates->val.dim(2) == 1,
          "scale_channels: gates must be (C,1,1)");
  const long plane = long(x->val.dim(1)) * x->val.dim(2);
  Tensor<T> out(x->val.shape());
  for (int c = 0; c < cn; ++c) {
    const T g = gates->val[c];
    for (long i = 0; i < plane; ++i) out[c * plane + i] = x->val[c * plane + i] * g;
  }
  return detail::make_op<T>(std::move(out), {x, gates}, [x, gates, cn, plane](Node<T>& n) {
    if (x->requires_grad) {
      Tensor<T>& dx = x->ensure_grad();
      for (int c = 0; c < cn; ++c) {
        const T g = gates->val[c];
        for (long i = 0; i < plane; ++i) dx[c * plane + i] += n.grad[c * plane + i] * g;
      }
    }
    if (gates->requires_grad) {
      Tensor<T>& dg = gates->ensure_grad();
      for (int c = 0; c < cn; ++c) {
        T acc = T(0);
        for (long i = 0; i < plane; ++i)
          acc += n.grad[c * plane + i] * x->val[c * plane + i];
        dg[c] += acc;
      }
    }
  });
}

// y[c](p) = x[c](p) * gate(p); gate has shape (1,H,W).
template <typename T>
Var<T> scale_spatial(const Var<T>& x, const Var<T>& gate) {
  const int cn = x->val.dim(0);
  const long plane = long(x->val.dim(1)) * x->val.dim(2);
  require(gate->val.rank() == 3 && gate->val.dim(0) == 1 && gate->val.numel() == plane,
          "scale_spatial: gate must be (1,H,W)");
  Tensor<T> out(x->val.shape());
  for (int c = 0; c < cn; ++c)
    for (long i = 0; i < plane; ++i)
      out[c * plane + i] = x->val[c * plane + i] * gate->val[i];
  return detail::make_op<T>(std::move(out), {x, gate}, [x, gate, cn, plane](Node<T>& n) {
    if (x->requires_grad) {
      Tensor<T>& dx = x->ensure_grad();
      for (int c = 0; c < cn; ++c)
        for (long i = 0; i < plane; ++i)
          dx[c * plane + i] += n.grad[c * plane + i] * gate->val[i];
    }
    if (gate->requires_grad) {
      Tensor<T>& dg = gate->ensure_grad();
      for (int c = 0; c < cn; ++c)
        for (long i = 0; i < plane; ++i)
          dg[i] += n.grad[c * plane + i] * x->val[c * plane + i];
    }
  });
}

// Rotations between (C,H,W) and (C,W,H); ccw followed by cw is the identity.
template <typename T>
Tensor<T> rot90_ccw_tensor(const Tensor<T>& in) {
  const int cn = in.dim(0), h = in.dim(1), w = in.dim(2);
  Tensor<T> out({cn, w, h});
  for (int c = 0; c < cn; ++c)
    for (int r = 0; r < w; ++r)
      for (int col = 0; col < h; ++col) out.at(c, r, col) = in.at(c, col, w - 1 - r);
  return out;
}

template <typename T>
Tensor<T> rot90_cw_tensor(const Tensor<T>& in) {
  const int cn = in.dim(0), h = in.dim(1), w = in.dim(2);
  Tensor<T> out({cn, w, h});
  for (int c = 0; c < cn; ++c)
    for (int r = 0; r < w; ++r)
      for (int col = 0; col < h; ++col) out.at(c, r, col) = in.at(c, h - 1 - col, r);
  return out;
}

template <typename T>
Var<T> rot90_ccw(const Var<T>& x) {
  return detail::make_op<T>(rot90_ccw_tensor(x->val), {x}, [x](Node<T>& n) {
    if (!x->requires_grad) return;
    axpy(T(1), rot90_cw_tensor(n.grad), x->ensure_grad());
  });
}

template <typename T>
Var<T> rot90_cw(const Var<T>& x) {
  return detail::make_op<T>(rot90_cw_tensor(x->val), {x}, [x](Node<T>& n) {
    if (!x->requires_grad) return;
    axpy(T(1), rot90_ccw_tensor(n.grad), x->ensure_grad());
  });
}

// Differentiable backward warp; gradients flow to both the source view and
// the disparity map. Derivatives with respect to the sampling position are
// zeroed where the position was clamped at the frame edge.
template <typename T>
Var<T> warp(const Var<T>& view, const Var<T>& disparity, T du, T dv) {
  Tensor<T> out = warp_view(view->val, disparity->val, du, dv);
  return detail::make_op<T>(std::move(out), {view, disparity},
                            [view, disparity, du, dv](Node<T>& n) {
    const int cn = view->val.dim(0), h = view->val.dim(1), w = view->val.dim(2);
    Tensor<T>* dview = view->requires_grad ? &view->ensure_grad() : nullptr;
    Tensor<T>* ddisp = disparity->requires_grad ? &disparity->ensure_grad() : nullptr;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const T d = disparity->val.at(0, y, x);
        const T rx = T(x) + du * d;
        const T ry = T(y) + dv * d;
        const bool clamped_x = rx < T(0) || rx > T(w - 1);
        const bool clamped_y = ry < T(0) || ry > T(h - 1);
        T sx = std::clamp(rx, T(0), T(w - 1));
        T sy = std::clamp(ry, T(0), T(h - 1));
        const int x0 = std::min(int(std::floor(sx)), w - 2 < 0 ? 0 : w - 2);
        const int y0 = std::min(int(std::floor(sy)), h - 2 < 0 ? 0 : h - 2);
        const T fx = sx - T(x0);
        const T fy = sy - T(y0);
        const int x1 = std::min(x0 + 1, w - 1);
        const int y1 = std::min(y0 + 1, h - 1);
        T ddisp_acc = T(0);
        for (int c = 0; c < cn; ++c) {
          const T g = n.grad.at(c, y, x);
          if (g == T(0)) continue;
          const T v00 = view->val.at(c, y0, x0), v01 = view->val.at(c, y0, x1);
          const T v10 = view->val.at(c, y1, x0), v11 = view->val.at(c, y1, x1);
          if (dview) {
            dview->at(c, y0, x0) += g * (T(1) - fx) * (T(1) - fy);
            dview->at(c, y0, x1) += g * fx * (T(1) - fy);
            dview->at(c, y1, x0) += g * (T(1) - fx) * fy;
            dview->at(c, y1, x1) += g * fx * fy;
          }
          if (ddisp) {
            const T dout_dsx = (v01 - v00) * (T(1) - fy) + (v11 - v10) * fy;
            const T dout_dsy = (v10 + fx * (v11 - v10)) - (v00 + fx * (v01 - v00));
            T dpos = T(0);
            if (!clamped_x) dpos += dout_dsx * du;
            if (!clamped_y) dpos += dout_dsy * dv;
            ddisp_acc += g * dpos;
          }
        }
        if (ddisp) ddisp->at(0, y, x) += ddisp_acc;
      }
    }
  });
}

// Forward differences with replicate boundary: the last column/row of the
// difference image is zero.
template <typename T>
Var<T> fdiff_x(const Var<T>& x) {
  const int cn = x->val.dim(0), h = x->val.dim(1), w = x->val.dim(2);
  Tensor<T> out(x->val.shape());
  for (int c = 0; c < cn; ++c)
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx + 1 < w; ++xx)
        out.at(c, y, xx) = x->val.at(c, y, xx + 1) - x->val.at(c, y, xx);
  return detail::make_op<T>(std::move(out), {x}, [x, cn, h, w](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    for (int c = 0; c < cn; ++c)
      for (int y = 0; y < h; ++y)
        for (int xx = 0; xx + 1 < w; ++xx) {
          const T g = n.grad.at(c, y, xx);
          dx.at(c, y, xx + 1) += g;
          dx.at(c, y, xx) -= g;
        }
  });
}

template <typename T>
Var<T> fdiff_y(const Var<T>& x) {
  const int cn = x->val.dim(0), h = x->val.dim(1), w = x->val.dim(2);
  Tensor<T> out(x->val.shape());
  for (int c = 0; c < cn; ++c)
    for (int y = 0; y + 1 < h; ++y)
      for (int xx = 0; xx < w; ++xx)
        out.at(c, y, xx) = x->val.at(c, y + 1, xx) - x->val.at(c, y, xx);
  return detail::make_op<T>(std::move(out), {x}, [x, cn, h, w](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    for (int c = 0; c < cn; ++c)
      for (int y = 0; y + 1 < h; ++y)
        for (int xx = 0; xx < w; ++xx) {
          const T g = n.grad.at(c, y, xx);
          dx.at(c, y + 1, xx) += g;
          dx.at(c, y, xx) -= g;
        }
  });
}

// Mean of |x| over all elements; the subgradient at zero is taken as zero.
template <typename T>
Var<T> mean_abs(const Var<T>& x) {
  const long n_elems = x->val.numel();
  Tensor<T> out({1});
  T acc = T(0);
  for (long i = 0; i < n_elems; ++i) acc += std::abs(x->val[i]);
  out[0] = acc / T(n_elems);
  return detail::make_op<T>(std::move(out), {x}, [x, n_elems](Node<T>& n) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = x->ensure_grad();
    const T g = n.grad[0] / T(n_elems);
    for (long i = 0; i < n_elems; ++i) {
      const T v = x->val[i];
      if (v > T(0))
        dx[i] += g;
      else if (v < T(0))
        dx[i] -= g;
    }
  });
}

// Scalar graph arithmetic for combining loss terms.
template <typename T>
Var<T> s_add(const Var<T>& a, const Var<T>& b) {
  require(a->val.numel() == 1 && b->val.numel() == 1, "s_add: scalars only");
  Tensor<T> out({1});
  out[0] = a->val[0] + b->val[0];
  return detail::make_op<T>(std::move(out), {a, b}, [a, b](Node<T>& n) {
    if (a->requires_grad) a->ensure_grad()[0] += n.grad[0];
    if (b->requires_grad) b->ensure_grad()[0] += n.grad[0];
  });
}

template <typename T>
Var<T> s_scale(const Var<T>& a, T c) {
  require(a->val.numel() == 1, "s_scale: scalars only");
  Tensor<T> out({1});
  out[0] = a->val[0] * c;
  return detail::make_op<T>(std::move(out), {a}, [a, c](Node<T>& n) {
    if (a->requires_grad) a->ensure_grad()[0] += n.grad[0] * c;
  });
}

}  // namespace lfvs::nn
