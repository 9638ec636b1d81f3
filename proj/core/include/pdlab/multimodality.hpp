#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "pdlab/bc.hpp"
#include "pdlab/common.hpp"
#include "pdlab/rng.hpp"
#include "pdlab/sac.hpp"

namespace pdlab {

// Center separation over pooled within-cluster std of a 2-means split on a
// 1-D projection; ratios above the threshold read as two distinct modes.
constexpr double kBimodalityRatioThreshold = 4.0;

struct ModeSplit {
  double center_separation = 0.0;  // |c1 - c2| after 2-means
  double within_std = 0.0;         // pooled within-cluster std
  double ratio = 0.0;              // separation / within_std
  int mode_count = 1;              // 2 when ratio exceeds the threshold
};

struct MultimodalityReport {
  Vec principal_direction;  // top principal direction of the base samples
  ModeSplit base;
  ModeSplit refined;
  int samples = 0;
};

// Unit-norm top eigenvector of the sample covariance. Throws NumericError
// when the samples have zero variance (no direction to project onto).
Vec top_principal_direction(const std::vector<Vec>& samples);

// 2-means on the projections of `samples` onto `direction`.
ModeSplit mode_split_1d(const std::vector<Vec>& samples, const Vec& direction,
                        std::uint64_t seed);

// Draws `samples` actions from each sampler (streams "mm_base" and
// "mm_refined" derived from seed), projects both onto the base samples' top
// principal direction, and 2-means-splits each projection.
MultimodalityReport analyze_multimodality(
    const std::function<Vec(Rng&)>& base_sampler,
    const std::function<Vec(Rng&)>& refined_sampler, int samples,
    std::uint64_t seed);

// Stochastic view of the cluster policy at one probe state: the cluster is
// drawn from the softmax over class logits (argmax's smooth counterpart),
// then center + offset as usual. This is what makes the base's
// multimodality observable as an action distribution.
std::function<Vec(Rng&)> cluster_action_sampler(const ClusterOffsetPolicy& p,
                                                const Vec& probe_state);

// base sample + scale * squashed residual actor sample (the epsilon = 1
// composition), clipped to the legal range.
std::function<Vec(Rng&)> decorated_action_sampler(
    const std::function<Vec(Rng&)>& base_sampler,
    const SquashedGaussianActor& actor, double compose_scale,
    const std::function<Vec(const Vec& obs, const Vec& base)>& psi,
    const Vec& probe_state);

}  // namespace pdlab
