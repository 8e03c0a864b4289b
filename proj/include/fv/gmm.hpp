#pragma once

#include <cstdint>
#include <vector>

#include "fv/types.hpp"

namespace fv {

struct GmmFitStats {
  std::size_t iterations = 0;
  std::vector<double> avg_loglik;  // one entry per E-step
};

// Diagonal-covariance EM initialized from a k-means run on the same data
// (weights from cluster sizes, means from centers, variances from
// within-cluster spread). var_floor is relative to the per-dimension global
// variance; every fitted variance is clamped to that floor. max_iter = 0
// returns the initialization unchanged.
GmmModel gmm_fit(const DescriptorSet& x, std::size_t k2, std::uint64_t seed,
                 std::size_t max_iter = 100, double tol = 1e-6,
                 double var_floor = 1e-4, GmmFitStats* stats = nullptr);

// Posterior responsibilities (Eq.(4) style), rows sum to 1.
Responsibilities gmm_posteriors(const GmmModel& m, const DescriptorSet& x);

// Average per-point log-likelihood, computed in the log domain.
double gmm_log_likelihood(const GmmModel& m, const DescriptorSet& x);

}  // namespace fv
