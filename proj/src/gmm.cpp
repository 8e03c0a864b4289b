#include "fv/gmm.hpp"

#include <algorithm>
#include <cmath>

#include "fv/common.hpp"
#include "fv/kernels.hpp"
#include "fv/kmeans.hpp"

namespace fv {
namespace {

// Per-dimension clamp floor: relative to the global variance, with a small
// absolute minimum so constant dimensions stay non-singular.
std::vector<double> variance_floor(const DescriptorSet& x, double rel) {
  const std::size_t d = x.dim;
  std::vector<double> mean(d, 0.0), floor(d, 0.0);
  for (std::size_t i = 0; i < x.n; ++i) {
    const float* row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += static_cast<double>(row[j]);
  }
  for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(x.n);
  for (std::size_t i = 0; i < x.n; ++i) {
    const float* row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = static_cast<double>(row[j]) - mean[j];
      floor[j] += diff * diff;
    }
  }
  for (std::size_t j = 0; j < d; ++j)
    floor[j] = std::max(rel * floor[j] / static_cast<double>(x.n), 1e-12);
  return floor;
}

GmmModel init_from_kmeans(const DescriptorSet& x, std::size_t k2,
                          std::uint64_t seed,
                          const std::vector<double>& floor) {
  const Codebook cb = kmeans_fit(x, k2, seed);
  const Memberships mem = kmeans_assign(cb, x);
  const std::size_t d = x.dim;

  GmmModel m;
  m.k2 = k2;
  m.dim = d;
  m.weights.assign(k2, 0.0);
  m.means = cb.centers;
  m.variances.assign(k2 * d, 0.0);

  std::vector<std::size_t> counts(k2, 0);
  for (std::size_t i = 0; i < x.n; ++i) {
    const std::uint32_t k = mem.assignments[i];
    ++counts[k];
    const float* row = x.row(i);
    const double* c = cb.center(k);
    double* var = m.variances.data() + std::size_t(k) * d;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = static_cast<double>(row[j]) - c[j];
      var[j] += diff * diff;
    }
  }

  const bool any_empty =
      std::find(counts.begin(), counts.end(), std::size_t{0}) != counts.end();
  for (std::size_t k = 0; k < k2; ++k) {
    // smoothing only matters in the rare empty-cluster edge case
    m.weights[k] = any_empty
                       ? (static_cast<double>(counts[k]) + 1.0) /
                             (static_cast<double>(x.n) + static_cast<double>(k2))
                       : static_cast<double>(counts[k]) /
                             static_cast<double>(x.n);
    for (std::size_t j = 0; j < d; ++j) {
      double v = counts[k] > 0
                     ? m.variances[k * d + j] / static_cast<double>(counts[k])
                     : 0.0;
      m.variances[k * d + j] = std::max(v, floor[j]);
    }
  }
  return m;
}

}  // namespace

GmmModel gmm_fit(const DescriptorSet& x, std::size_t k2, std::uint64_t seed,
                 std::size_t max_iter, double tol, double var_floor,
                 GmmFitStats* stats) {
  if (k2 < 1) fail_usage("mixture size must be >= 1");
  if (x.dim < 1) fail_data("empty descriptor dimension");
  if (x.n < k2) fail_data("fewer points than mixture components (N < k2)");

  const std::size_t d = x.dim;
  const double n = static_cast<double>(x.n);
  const std::vector<double> floor = variance_floor(x, var_floor);
  GmmModel m = init_from_kmeans(x, k2, seed, floor);

  if (stats != nullptr) {
    stats->iterations = 0;
    stats->avg_loglik.clear();
  }

  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iter; ++it) {
    const GmmStats st = kernels::estep_accumulate(m, x);
    const double avg = st.loglik / n;
    if (stats != nullptr) {
      stats->avg_loglik.push_back(avg);
      stats->iterations = it + 1;
    }
    if (it > 0 && avg - prev <= tol * std::abs(prev)) break;
    prev = avg;

    double total = 0.0;
    for (std::size_t k = 0; k < k2; ++k) {
      if (!(st.nk[k] > 0.0))
        fail_numeric("mixture component collapsed during EM");
      total += st.nk[k];
    }
    for (std::size_t k = 0; k < k2; ++k) {
      m.weights[k] = st.nk[k] / total;
      const double inv = 1.0 / st.nk[k];
      for (std::size_t j = 0; j < d; ++j) {
        const double mu = st.sx[k * d + j] * inv;
        m.means[k * d + j] = mu;
        const double v = st.sxx[k * d + j] * inv - mu * mu;
        m.variances[k * d + j] = std::max(v, floor[j]);
      }
    }
  }
  return m;
}

Responsibilities gmm_posteriors(const GmmModel& m, const DescriptorSet& x) {
  if (m.dim != x.dim)
    fail_data("dimension mismatch between mixture and descriptors");
  Responsibilities r;
  r.n = x.n;
  r.k2 = m.k2;
  r.q.resize(x.n * m.k2);
  kernels::posterior_rows(m, x, r.q.data());
  return r;
}

double gmm_log_likelihood(const GmmModel& m, const DescriptorSet& x) {
  if (m.dim != x.dim)
    fail_data("dimension mismatch between mixture and descriptors");
  if (x.n == 0) fail_data("cannot evaluate likelihood of an empty set");
  return kernels::log_likelihood_sum(m, x) / static_cast<double>(x.n);
}

}  // namespace fv
