#pragma once

#include <functional>
#include <vector>

#include "pdlab/common.hpp"
#include "pdlab/rng.hpp"

namespace pdlab {

// Finite 1-D Gaussian mixture. Weights are nonnegative and sum to 1;
// component stds are positive.
struct GaussianMixture1D {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> stds;

  int components() const { return static_cast<int>(weights.size()); }
  void validate() const;  // throws ConfigError on broken invariants

  double pdf(double x) const;
  double cdf(double x) const;
  double sample(Rng& rng) const;
};

// Density of X + Y where X ~ mixture and Y ~ N(mu, sigma^2) independent:
// each component (w_i, mu_i, sigma_i) becomes (w_i, mu_i + mu,
// sqrt(sigma_i^2 + sigma^2)). sigma = 0 is the delta-convolution limit.
GaussianMixture1D mixture_sum_density(const GaussianMixture1D& mixture,
                                      double mu, double sigma);

// Standard normal CDF via erfc (double-precision accurate on the real line).
double normal_cdf(double z);

// Two-sided Kolmogorov-Smirnov statistic between the empirical CDF of
// `samples` and the analytic CDF `cdf`. Samples are copied and sorted.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

}  // namespace pdlab
