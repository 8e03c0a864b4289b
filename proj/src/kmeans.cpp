#include "fv/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fv/common.hpp"
#include "fv/kernels.hpp"
#include "fv/rng.hpp"

namespace fv {
namespace {

double sq_dist(const float* x, const double* c, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = static_cast<double>(x[j]) - c[j];
    s += diff * diff;
  }
  return s;
}

// k-means++: D^2-weighted sampling via inverse CDF on the seeded stream.
std::vector<double> seed_centers(const DescriptorSet& x, std::size_t k1,
                                 Rng& rng) {
  const std::size_t d = x.dim;
  std::vector<double> centers(k1 * d);
  const std::size_t first = rng.below(x.n);
  for (std::size_t j = 0; j < d; ++j)
    centers[j] = static_cast<double>(x.row(first)[j]);

  std::vector<double> min_d2(x.n, std::numeric_limits<double>::infinity());
  for (std::size_t k = 1; k < k1; ++k) {
    const double* newest = centers.data() + (k - 1) * d;
    double total = 0.0;
    for (std::size_t i = 0; i < x.n; ++i) {
      const double d2 = sq_dist(x.row(i), newest, d);
      if (d2 < min_d2[i]) min_d2[i] = d2;
      total += min_d2[i];
    }
    if (!(total > 0.0))
      fail_numeric("degenerate input: fewer distinct points than clusters");
    const double r = rng.uniform() * total;
    double cum = 0.0;
    std::size_t pick = x.n;  // last positive-weight point seen
    for (std::size_t i = 0; i < x.n; ++i) {
      if (min_d2[i] <= 0.0) continue;
      cum += min_d2[i];
      pick = i;
      if (cum >= r) break;
    }
    for (std::size_t j = 0; j < d; ++j)
      centers[k * d + j] = static_cast<double>(x.row(pick)[j]);
  }
  return centers;
}

}  // namespace

Codebook kmeans_fit(const DescriptorSet& x, std::size_t k1, std::uint64_t seed,
                    std::size_t max_iter, double tol, KmeansStats* stats) {
  if (k1 < 1) fail_usage("codebook size must be >= 1");
  if (x.dim < 1) fail_data("empty descriptor dimension");
  if (x.n < k1) fail_data("fewer points than clusters (N < k1)");

  Rng rng(seed);
  const std::size_t d = x.dim;
  Codebook cb;
  cb.k1 = k1;
  cb.dim = d;
  cb.centers = seed_centers(x, k1, rng);

  if (stats != nullptr) {
    stats->iterations = 0;
    stats->objective.clear();
  }

  std::vector<std::uint32_t> assign(x.n);
  std::vector<double> sums(k1 * d);
  std::vector<std::size_t> counts(k1);
  double prev_obj = std::numeric_limits<double>::infinity();

  for (std::size_t it = 0; it < max_iter; ++it) {
    double obj = 0.0;
    kernels::assign_nearest(cb, x, assign.data(), &obj);
    if (stats != nullptr) {
      stats->objective.push_back(obj);
      stats->iterations = it + 1;
    }
    if (it > 0) {
      const double drop = prev_obj - obj;
      if (drop <= tol * std::max(prev_obj, 1e-300)) break;
    }
    prev_obj = obj;

    // new centers: serial accumulation in point order keeps the fit
    // bit-reproducible
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    for (std::size_t i = 0; i < x.n; ++i) {
      const std::uint32_t k = assign[i];
      ++counts[k];
      const float* row = x.row(i);
      double* s = sums.data() + std::size_t(k) * d;
      for (std::size_t j = 0; j < d; ++j) s[j] += static_cast<double>(row[j]);
    }
    for (std::size_t k = 0; k < k1; ++k) {
      if (counts[k] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[k]);
      for (std::size_t j = 0; j < d; ++j)
        cb.centers[k * d + j] = sums[k * d + j] * inv;
    }

    // re-seed empty clusters with the farthest point from its center
    if (std::find(counts.begin(), counts.end(), std::size_t{0}) !=
        counts.end()) {
      std::vector<double> dist(x.n);
      for (std::size_t i = 0; i < x.n; ++i)
        dist[i] = sq_dist(x.row(i), cb.center(assign[i]), d);
      for (std::size_t k = 0; k < k1; ++k) {
        if (counts[k] != 0) continue;
        std::size_t far = 0;
        for (std::size_t i = 1; i < x.n; ++i)
          if (dist[i] > dist[far]) far = i;
        if (!(dist[far] > 0.0))
          fail_numeric("degenerate input: cannot re-seed empty cluster");
        for (std::size_t j = 0; j < d; ++j)
          cb.centers[k * d + j] = static_cast<double>(x.row(far)[j]);
        dist[far] = -1.0;
      }
    }
  }
  return cb;
}

Memberships kmeans_assign(const Codebook& cb, const DescriptorSet& x) {
  if (cb.dim != x.dim)
    fail_data("dimension mismatch between codebook and descriptors");
  Memberships m;
  m.assignments.resize(x.n);
  kernels::assign_nearest(cb, x, m.assignments.data());
  return m;
}

}  // namespace fv
