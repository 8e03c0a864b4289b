#pragma once

#include <cstdint>
#include <vector>

#include "fv/types.hpp"

namespace fv {

struct KmeansStats {
  std::size_t iterations = 0;
  std::vector<double> objective;  // summed squared distance after each assign
};

// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed seed.
// Empty clusters are re-seeded with the point farthest from its center;
// fails if the data cannot support k1 distinct centers.
Codebook kmeans_fit(const DescriptorSet& x, std::size_t k1, std::uint64_t seed,
                    std::size_t max_iter = 100, double tol = 1e-6,
                    KmeansStats* stats = nullptr);

// Nearest-center memberships, ties broken toward the lowest index.
Memberships kmeans_assign(const Codebook& cb, const DescriptorSet& x);

}  // namespace fv
