#pragma once

#include <map>

#include "lfvs/networks.hpp"

namespace lfvs::nn {

// Adam with bias correction. Step count starts at 0; state tensors are
// exposed by parameter name so checkpoints can persist them.
template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<NamedParam<T>> params, double lr, double beta1, double beta2,
       double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& p : params_) {
      m_[p.name] = Tensor<T>(p.var->val.shape());
      v_[p.name] = Tensor<T>(p.var->val.shape());
    }
  }

  // Applies one update from the gradients currently accumulated on the
  // parameters, then leaves the gradients untouched (caller clears them).
  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, double(t_));
    const double bc2 = 1.0 - std::pow(beta2_, double(t_));
    for (const auto& p : params_) {
      if (p.var->grad.empty()) continue;
      Tensor<T>& m = m_[p.name];
      Tensor<T>& v = v_[p.name];
      Tensor<T>& g = p.var->grad;
      Tensor<T>& x = p.var->val;
      for (long i = 0; i < x.numel(); ++i) {
        m[i] = T(beta1_) * m[i] + T(1.0 - beta1_) * g[i];
        v[i] = T(beta2_) * v[i] + T(1.0 - beta2_) * g[i] * g[i];
        const double mhat = double(m[i]) / bc1;
        const double vhat = double(v[i]) / bc2;
        x[i] -= T(lr_ * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  long step_count() const { return t_; }
  void set_step_count(long t) { t_ = t; }

  std::map<std::string, Tensor<T>>& first_moments() { return m_; }
  std::map<std::string, Tensor<T>>& second_moments() { return v_; }

 private:
  std::vector<NamedParam<T>> params_;
  std::map<std::string, Tensor<T>> m_, v_;
  double lr_ = 1e-4, beta1_ = 0.9, beta2_ = 0.99, eps_ = 1e-8;
  long t_ = 0;
};

}  // namespace lfvs::nn
