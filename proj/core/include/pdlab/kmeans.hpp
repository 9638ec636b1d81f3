#pragma once

#include <cstdint>
#include <vector>

#include "pdlab/common.hpp"

namespace pdlab {

// Lloyd's algorithm with k-means++ seeding, run to convergence (max center
// shift < 1e-9). A cluster that empties is re-seeded at the point farthest
// from its assigned center. Deterministic per seed.
std::vector<Vec> fit_kmeans(const std::vector<Vec>& points, int k,
                            std::uint64_t seed);

int nearest_center(const std::vector<Vec>& centers, const Vec& p);

// Sum over points of squared distance to the nearest center.
double kmeans_wcss(const std::vector<Vec>& centers,
                   const std::vector<Vec>& points);

}  // namespace pdlab
