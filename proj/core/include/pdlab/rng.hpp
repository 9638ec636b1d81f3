#pragma once

#include <cstdint>
#include <string_view>

#include "pdlab/common.hpp"

namespace pdlab {

// Deterministic PRNG with hand-rolled distributions. std::mt19937_64 is
// stable across platforms but std::*_distribution is not, so uniform/normal
// sampling is implemented here to keep runs byte-reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer on [0, n). Rejection sampling, bias-free.
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal via Box-Muller (cached spare).
  double normal();
  double normal(double mean, double std);

  // Fills v with iid standard normals.
  void fill_normal(Vec& v);
  void fill_normal(Mat& m);

 private:
  std::uint64_t s_[4];  // xoshiro256++ state
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derives an independent stream seed from (master, stream name, index).
// Named streams keep components decoupled: adding draws to one stream never
// perturbs another, which the reduction-identity tests rely on.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index = 0);

}  // namespace pdlab
