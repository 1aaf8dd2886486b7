#pragma once

#include "lfvs/autograd.hpp"

namespace lfvs::nn {

struct LossWeights {
  double lambda1 = 0.5;    // gradient term of the reconstruction loss
  double lambda2 = 0.25;   // pixel term of the warp loss
  double lambda3 = 0.125;  // gradient term of the warp loss
};

// All L1 terms are means over elements, so the weights are independent of
// resolution. The gradient term uses forward differences with replicate
// boundary (zero in the last row/column), counted in the same mean.
template <typename T>
Var<T> l1_with_gradient(const Var<T>& a, const Var<T>& b, T lambda_grad) {
  auto d = sub(a, b);
  auto pix = mean_abs(d);
  auto grad = s_add(mean_abs(fdiff_x(d)), mean_abs(fdiff_y(d)));
  return s_add(pix, s_scale(grad, lambda_grad));
}

template <typename T>
Var<T> loss_final(const Var<T>& pred, const Var<T>& gt, T lambda1) {
  require(pred->val.same_shape(gt->val), "loss_final: extent mismatch");
  return l1_with_gradient(pred, gt, lambda1);
}

template <typename T>
Var<T> loss_warp(const std::array<Var<T>, 3>& warped, const Var<T>& gt, T lambda2,
                 T lambda3) {
  Var<T> total;
  for (const auto& w : warped) {
    require(w->val.same_shape(gt->val), "loss_warp: extent mismatch");
    auto d = sub(gt, w);
    auto term = s_add(s_scale(mean_abs(d), lambda2),
                      s_scale(s_add(mean_abs(fdiff_x(d)), mean_abs(fdiff_y(d))), lambda3));
    total = total ? s_add(total, term) : term;
  }
  return total;
}

template <typename T>
Var<T> total_loss(const Var<T>& pred, const std::array<Var<T>, 3>& warped,
                  const Var<T>& gt, const LossWeights& w) {
  return s_add(loss_final(pred, gt, T(w.lambda1)),
               loss_warp(warped, gt, T(w.lambda2), T(w.lambda3)));
}

}  // namespace lfvs::nn
