#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lfvs {

// Error hierarchy. The CLI maps these onto exit codes:
//   UsageError -> 1, DataError -> 2, NumericError -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}
inline void require_data(bool cond, const std::string& msg) {
  if (!cond) throw DataError(msg);
}
inline void require_usage(bool cond, const std::string& msg) {
  if (!cond) throw UsageError(msg);
}

// Deterministic RNG with a fully specified algorithm so that seeded runs
// reproduce across platforms and standard library versions
// (std::uniform_*_distribution sequences are implementation-defined).
//
// splitmix64 core, Box-Muller for normals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  uint64_t uniform_int(uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    uint64_t threshold = (~n + 1) % n;  // == 2^64 mod n
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  int uniform_index(int n) { return int(uniform_int(uint64_t(n))); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  template <typename Container>
  void shuffle(Container& c) {
    for (size_t i = c.size(); i > 1; --i) {
      size_t j = size_t(uniform_int(i));
      std::swap(c[i - 1], c[j]);
    }
  }

  // Decorrelated child stream, e.g. one per scene or per training step.
  static uint64_t derive(uint64_t seed, uint64_t stream) {
    Rng r(seed ^ (0x632be59bd9b4e019ull * (stream + 1)));
    return r.next_u64();
  }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline const char* version_string() { return "0.1.0"; }

}  // namespace lfvs
