#pragma once

#include <algorithm>
#include <cstring>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <vector>

#include "lfvs/common.hpp"

namespace lfvs {

// Dense row-major tensor. Images and feature volumes use CHW layout,
// convolution weights use (out, in, kh, kw).
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(size_t(numel_of(shape_)), T(0));
  }

  Tensor(std::initializer_list<int> shape) : Tensor(std::vector<int>(shape)) {}

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<int> shape, T value) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return int(shape_.size()); }
  int dim(int i) const { return shape_[size_t(i)]; }
  long numel() const { return long(data_.size()); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](long i) { return data_[size_t(i)]; }
  const T& operator[](long i) const { return data_[size_t(i)]; }

  // CHW accessors.
  T& at(int c, int y, int x) {
    return data_[size_t((long(c) * shape_[1] + y) * shape_[2] + x)];
  }
  const T& at(int c, int y, int x) const {
    return data_[size_t((long(c) * shape_[1] + y) * shape_[2] + x)];
  }

  int channels() const { return shape_.size() == 3 ? shape_[0] : 0; }
  int height() const { return shape_.size() == 3 ? shape_[1] : 0; }
  int width() const { return shape_.size() == 3 ? shape_[2] : 0; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  void zero() { fill(T(0)); }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape_);
    for (long i = 0; i < numel(); ++i) out[i] = U(data_[size_t(i)]);
    return out;
  }

  std::string shape_str() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
    os << ")";
    return os.str();
  }

  static long numel_of(const std::vector<int>& shape) {
    long n = 1;
    for (int d : shape) {
      require(d >= 0, "tensor dimension must be nonnegative");
      n *= d;
    }
    return n;
  }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

template <typename T>
void axpy(T a, const Tensor<T>& x, Tensor<T>& y) {
  require(x.numel() == y.numel(), "axpy: size mismatch");
  const T* xs = x.data();
  T* ys = y.data();
  for (long i = 0; i < x.numel(); ++i) ys[i] += a * xs[i];
}

template <typename T>
T max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
  require(a.same_shape(b), "max_abs_diff: shape mismatch");
  T m = T(0);
  for (long i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <typename T>
bool bit_equal(const Tensor<T>& a, const Tensor<T>& b) {
  if (!a.same_shape(b)) return false;
  return std::memcmp(a.data(), b.data(), size_t(a.numel()) * sizeof(T)) == 0;
}

// Pixel-wise average of three equally shaped tensors. Shared by the
// refinement head and by tests that reconstruct the zero-residual case;
// both must produce bit-identical results.
template <typename T>
Tensor<T> average3(const Tensor<T>& a, const Tensor<T>& b, const Tensor<T>& c) {
  require(a.same_shape(b) && a.same_shape(c), "average3: shape mismatch");
  Tensor<T> out(a.shape());
  const T k = T(1) / T(3);
  for (long i = 0; i < a.numel(); ++i) out[i] = (a[i] + b[i] + c[i]) * k;
  return out;
}

}  // namespace lfvs
