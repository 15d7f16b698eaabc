#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "blindmimo/types.hpp"

namespace blindmimo {

/// Caller-owned random stream. Deterministic for a given seed and build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
  double normal() { return normal_(engine_); }
  /// Circularly symmetric CN(0, 1): real and imaginary parts each N(0, 1/2).
  cplx complex_normal();
  bool bernoulli(double p) { return unit_(engine_) < p; }
  /// Uniform integer in [0, n).
  int uniform_index(int n);
  std::uint64_t next_u64() { return engine_(); }

  CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Counter-based seed splitting: order independent, so trial streams do not
/// depend on scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> counters);

}  // namespace blindmimo
