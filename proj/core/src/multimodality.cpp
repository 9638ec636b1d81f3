#include "pdlab/multimodality.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "pdlab/kmeans.hpp"

namespace pdlab {

Vec top_principal_direction(const std::vector<Vec>& samples) {
  require(!samples.empty(), "top_principal_direction: no samples");
  const int d = static_cast<int>(samples[0].size());
  Vec mean = Vec::Zero(d);
  for (const Vec& s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  Mat cov = Mat::Zero(d, d);
  for (const Vec& s : samples) {
    const Vec c = s - mean;
    cov += c * c.transpose();
  }
  cov /= std::max<double>(1.0, static_cast<double>(samples.size()) - 1.0);
  if (cov.norm() < 1e-15)
    throw NumericError(
        "top_principal_direction: degenerate samples (zero variance)");
  Eigen::SelfAdjointEigenSolver<Mat> solver(cov);
  Vec dir = solver.eigenvectors().col(d - 1);  // largest eigenvalue is last
  // Deterministic sign: first component of non-negligible magnitude points
  // positive.
  for (int i = 0; i < d; ++i) {
    if (std::abs(dir[i]) > 1e-12) {
      if (dir[i] < 0.0) dir = -dir;
      break;
    }
  }
  return dir;
}

ModeSplit mode_split_1d(const std::vector<Vec>& samples, const Vec& direction,
                        std::uint64_t seed) {
  require(samples.size() >= 2, "mode_split_1d: need at least two samples");
  std::vector<Vec> proj(samples.size(), Vec(1));
  double lo = 0.0, hi = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    proj[i][0] = direction.dot(samples[i]);
    if (i == 0) lo = hi = proj[i][0];
    lo = std::min(lo, proj[i][0]);
    hi = std::max(hi, proj[i][0]);
  }
  if (hi - lo < 1e-15)
    throw NumericError("mode_split_1d: degenerate samples (zero variance)");
  const std::vector<Vec> centers = fit_kmeans(proj, 2, seed);

  ModeSplit out;
  out.center_separation = std::abs(centers[0][0] - centers[1][0]);
  double wss = 0.0;
  for (const Vec& p : proj) {
    const int c = nearest_center(centers, p);
    const double r = p[0] - centers[c][0];
    wss += r * r;
  }
  out.within_std = std::sqrt(wss / static_cast<double>(proj.size()));
  out.ratio = out.within_std > 0.0
                  ? out.center_separation / out.within_std
                  : std::numeric_limits<double>::infinity();
  out.mode_count = out.ratio > kBimodalityRatioThreshold ? 2 : 1;
  return out;
}

MultimodalityReport analyze_multimodality(
    const std::function<Vec(Rng&)>& base_sampler,
    const std::function<Vec(Rng&)>& refined_sampler, int samples,
    std::uint64_t seed) {
  require(samples >= 1000, "analyze_multimodality: need at least 1000 samples");
  Rng base_rng(derive_seed(seed, "mm_base"));
  Rng refined_rng(derive_seed(seed, "mm_refined"));
  std::vector<Vec> base(samples), refined(samples);
  for (int i = 0; i < samples; ++i) base[i] = base_sampler(base_rng);
  for (int i = 0; i < samples; ++i) refined[i] = refined_sampler(refined_rng);

  MultimodalityReport rep;
  rep.samples = samples;
  rep.principal_direction = top_principal_direction(base);
  rep.base = mode_split_1d(base, rep.principal_direction,
                           derive_seed(seed, "mm_split", 0));
  rep.refined = mode_split_1d(refined, rep.principal_direction,
                              derive_seed(seed, "mm_split", 1));
  return rep;
}

std::function<Vec(Rng&)> cluster_action_sampler(const ClusterOffsetPolicy& p,
                                                const Vec& probe_state) {
  // The class distribution and the offset are both deterministic functions
  // of the probe state; precompute them once.
  const Vec feat = p.features(probe_state);
  const Vec logits = mlp_forward(p.class_head, feat);
  const double m = logits.maxCoeff();
  Vec probs = (logits.array() - m).exp();
  probs /= probs.sum();
  const Vec offset = p.offset(probe_state);
  const std::vector<Vec> centers = p.cluster_centers;
  return [probs, offset, centers](Rng& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    int pick = static_cast<int>(centers.size()) - 1;
    for (int i = 0; i < static_cast<int>(centers.size()); ++i) {
      cum += probs[i];
      if (u < cum) {
        pick = i;
        break;
      }
    }
    return clip(Vec(centers[pick] + offset));
  };
}

std::function<Vec(Rng&)> decorated_action_sampler(
    const std::function<Vec(Rng&)>& base_sampler,
    const SquashedGaussianActor& actor, double compose_scale,
    const std::function<Vec(const Vec& obs, const Vec& base)>& psi,
    const Vec& probe_state) {
  const SquashedGaussianActor a = actor;
  return [base_sampler, a, compose_scale, psi, probe_state](Rng& rng) {
    const Vec base = base_sampler(rng);
    const ActorSampleResult s = actor_sample(a, psi(probe_state, base), rng);
    return clip(Vec(base + compose_scale * s.action));
  };
}

}  // namespace pdlab
