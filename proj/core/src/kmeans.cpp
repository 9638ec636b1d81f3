#include "pdlab/kmeans.hpp"

#include <limits>

#include "pdlab/rng.hpp"

namespace pdlab {

int nearest_center(const std::vector<Vec>& centers, const Vec& p) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < centers.size(); ++c) {
    const double d = (centers[c] - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

double kmeans_wcss(const std::vector<Vec>& centers,
                   const std::vector<Vec>& points) {
  double total = 0.0;
  for (const auto& p : points)
    total += (centers[nearest_center(centers, p)] - p).squaredNorm();
  return total;
}

std::vector<Vec> fit_kmeans(const std::vector<Vec>& points, int k,
                            std::uint64_t seed) {
  require(k >= 1, "fit_kmeans: k must be >= 1");
  require(static_cast<int>(points.size()) >= k,
          "fit_kmeans: need at least k points");
  const size_t n = points.size();
  Rng rng(derive_seed(seed, "kmeans"));

  // k-means++ seeding: each next center drawn proportional to squared
  // distance from the chosen set.
  std::vector<Vec> centers;
  centers.reserve(k);
  centers.push_back(points[rng.uniform_int(n)]);
  std::vector<double> d2(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      d2[i] = (points[i] - centers[nearest_center(centers, points[i])])
                  .squaredNorm();
      total += d2[i];
    }
    if (total <= 0.0) {
      // All points coincide with existing centers; any choice is equivalent.
      centers.push_back(points[rng.uniform_int(n)]);
      continue;
    }
    double r = rng.uniform() * total;
    size_t pick = n - 1;
    for (size_t i = 0; i < n; ++i) {
      r -= d2[i];
      if (r <= 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(points[pick]);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 1000; ++iter) {
    for (size_t i = 0; i < n; ++i) assign[i] = nearest_center(centers, points[i]);

    std::vector<Vec> sums(k, Vec::Zero(points[0].size()));
    std::vector<int> counts(k, 0);
    for (size_t i = 0; i < n; ++i) {
      sums[assign[i]] += points[i];
      counts[assign[i]] += 1;
    }
    double max_shift = 0.0;
    for (int c = 0; c < k; ++c) {
      Vec next;
      if (counts[c] == 0) {
        // Empty cluster: re-seed at the point farthest from its own center.
        size_t far_i = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < n; ++i) {
          const double d = (points[i] - centers[assign[i]]).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        next = points[far_i];
      } else {
        next = sums[c] / counts[c];
      }
      max_shift = std::max(max_shift, (next - centers[c]).norm());
      centers[c] = std::move(next);
    }
    if (max_shift < 1e-9) break;
  }
  return centers;
}

}  // namespace pdlab
