#include "pdlab/mixture.hpp"

#include <algorithm>
#include <cmath>

namespace pdlab {
namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kInvSqrt2 = 0.7071067811865476;
}  // namespace

void GaussianMixture1D::validate() const {
  if (weights.empty() || weights.size() != means.size() ||
      weights.size() != stds.size())
    throw ConfigError("GaussianMixture1D: weights/means/stds sizes disagree");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0))
      throw ConfigError("GaussianMixture1D: negative component weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("GaussianMixture1D: weights must sum to 1");
  for (double s : stds)
    if (!(s > 0.0))
      throw ConfigError("GaussianMixture1D: component std must be positive");
}

double GaussianMixture1D::pdf(double x) const {
  double p = 0.0;
  for (int i = 0; i < components(); ++i) {
    const double z = (x - means[i]) / stds[i];
    p += weights[i] * kInvSqrt2Pi / stds[i] * std::exp(-0.5 * z * z);
  }
  return p;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double GaussianMixture1D::cdf(double x) const {
  double c = 0.0;
  for (int i = 0; i < components(); ++i)
    c += weights[i] * normal_cdf((x - means[i]) / stds[i]);
  return c;
}

double GaussianMixture1D::sample(Rng& rng) const {
  const double u = rng.uniform();
  double cum = 0.0;
  int pick = components() - 1;  // guard against u landing past rounding
  for (int i = 0; i < components(); ++i) {
    cum += weights[i];
    if (u < cum) {
      pick = i;
      break;
    }
  }
  return means[pick] + stds[pick] * rng.normal();
}

GaussianMixture1D mixture_sum_density(const GaussianMixture1D& mixture,
                                      double mu, double sigma) {
  mixture.validate();
  require(sigma >= 0.0, "mixture_sum_density: sigma must be non-negative");
  GaussianMixture1D out = mixture;
  for (int i = 0; i < out.components(); ++i) {
    out.means[i] += mu;
    out.stds[i] = std::sqrt(out.stds[i] * out.stds[i] + sigma * sigma);
  }
  return out;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  require(!samples.empty(), "ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

}  // namespace pdlab
