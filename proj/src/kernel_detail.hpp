#pragma once

#include <cmath>
#include <limits>

#include "fv/kernels.hpp"

namespace fv::detail {

// Fills logp[k] = log pi_k + log N(x; mu_k, var_k) and returns the
// log-sum-exp over k.
inline double point_log_joint(const GmmEval& ev, const GmmModel& m,
                              const float* x, double* logp) {
  const std::size_t k2 = ev.k2;
  const std::size_t d = ev.dim;
  double max_lp = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < k2; ++k) {
    const double* mu = m.means.data() + k * d;
    const double* iv = ev.inv_var.data() + k * d;
    double quad = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = static_cast<double>(x[j]) - mu[j];
      quad += diff * diff * iv[j];
    }
    const double lp = ev.log_const[k] - 0.5 * quad;
    logp[k] = lp;
    if (lp > max_lp) max_lp = lp;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < k2; ++k) sum += std::exp(logp[k] - max_lp);
  return max_lp + std::log(sum);
}

// Converts log joints to posteriors in place.
inline void to_posteriors(std::size_t k2, double lse, double* logp) {
  for (std::size_t k = 0; k < k2; ++k) logp[k] = std::exp(logp[k] - lse);
}

// Adds one point's soft-count contributions: nk[k2], sx/sxx[k2*d].
inline void accumulate_estep(const GmmEval& ev, const float* x,
                             const double* q, double* nk, double* sx,
                             double* sxx) {
  const std::size_t k2 = ev.k2;
  const std::size_t d = ev.dim;
  for (std::size_t k = 0; k < k2; ++k) {
    const double qk = q[k];
    nk[k] += qk;
    double* sxk = sx + k * d;
    double* sxxk = sxx + k * d;
    for (std::size_t j = 0; j < d; ++j) {
      const double xj = static_cast<double>(x[j]);
      sxk[j] += qk * xj;
      sxxk[j] += qk * xj * xj;
    }
  }
}

// Adds one point's Eq.(2)/(3) inner sums: mu-half then sigma-half.
inline void accumulate_fv(const GmmEval& ev, const GmmModel& m, const float* x,
                          const double* q, double* out) {
  const std::size_t k2 = ev.k2;
  const std::size_t d = ev.dim;
  double* mu_half = out;
  double* sig_half = out + k2 * d;
  for (std::size_t k = 0; k < k2; ++k) {
    const double qk = q[k];
    const double* mu = m.means.data() + k * d;
    const double* isg = ev.inv_sigma.data() + k * d;
    const double* iv = ev.inv_var.data() + k * d;
    double* a = mu_half + k * d;
    double* b = sig_half + k * d;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = static_cast<double>(x[j]) - mu[j];
      a[j] += qk * diff * isg[j];
      b[j] += qk * (diff * diff * iv[j] - 1.0);
    }
  }
}

}  // namespace fv::detail
