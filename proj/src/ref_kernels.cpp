#include <algorithm>
#include <cmath>

#include "fv/common.hpp"
#include "fv/kernels.hpp"
#include "kernel_detail.hpp"

// Straight-line serial versions of the kernels: one loop over points, plain
// accumulation in point order. These stay the oracle for the OpenMP kernels.
namespace fv::ref {

void assign_nearest(const Codebook& cb, const DescriptorSet& x,
                    std::uint32_t* out, double* obj) {
  if (cb.dim != x.dim) fail_data("dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < x.n; ++i) {
    const float* row = x.row(i);
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_k = 0;
    for (std::size_t k = 0; k < cb.k1; ++k) {
      const double* c = cb.center(k);
      double dist = 0.0;
      for (std::size_t j = 0; j < x.dim; ++j) {
        const double diff = static_cast<double>(row[j]) - c[j];
        dist += diff * diff;
      }
      if (dist < best) {
        best = dist;
        best_k = static_cast<std::uint32_t>(k);
      }
    }
    out[i] = best_k;
    total += best;
  }
  if (obj != nullptr) *obj = total;
}

void posterior_rows(const GmmModel& m, const DescriptorSet& x, double* q) {
  if (m.dim != x.dim) fail_data("dimension mismatch");
  const GmmEval ev(m);
  std::vector<double> logp(m.k2);
  for (std::size_t i = 0; i < x.n; ++i) {
    const double lse = detail::point_log_joint(ev, m, x.row(i), logp.data());
    detail::to_posteriors(m.k2, lse, logp.data());
    std::copy(logp.begin(), logp.end(), q + i * m.k2);
  }
}

double log_likelihood_sum(const GmmModel& m, const DescriptorSet& x) {
  if (m.dim != x.dim) fail_data("dimension mismatch");
  const GmmEval ev(m);
  std::vector<double> logp(m.k2);
  double total = 0.0;
  for (std::size_t i = 0; i < x.n; ++i)
    total += detail::point_log_joint(ev, m, x.row(i), logp.data());
  return total;
}

GmmStats estep_accumulate(const GmmModel& m, const DescriptorSet& x) {
  if (m.dim != x.dim) fail_data("dimension mismatch");
  const GmmEval ev(m);
  GmmStats s;
  s.nk.assign(m.k2, 0.0);
  s.sx.assign(m.k2 * m.dim, 0.0);
  s.sxx.assign(m.k2 * m.dim, 0.0);
  std::vector<double> logp(m.k2);
  for (std::size_t i = 0; i < x.n; ++i) {
    const float* row = x.row(i);
    const double lse = detail::point_log_joint(ev, m, row, logp.data());
    s.loglik += lse;
    detail::to_posteriors(m.k2, lse, logp.data());
    detail::accumulate_estep(ev, row, logp.data(), s.nk.data(), s.sx.data(),
                             s.sxx.data());
  }
  return s;
}

void fv_sums(const GmmModel& m, const DescriptorSet& x, double* out) {
  if (m.dim != x.dim) fail_data("dimension mismatch");
  const GmmEval ev(m);
  std::fill(out, out + 2 * m.k2 * m.dim, 0.0);
  std::vector<double> logp(m.k2);
  for (std::size_t i = 0; i < x.n; ++i) {
    const float* row = x.row(i);
    const double lse = detail::point_log_joint(ev, m, row, logp.data());
    detail::to_posteriors(m.k2, lse, logp.data());
    detail::accumulate_fv(ev, m, row, logp.data(), out);
  }
}

void fv_sums(const GmmModel& m, const DescriptorSet& x,
             std::span<const std::uint32_t> rows, double* out) {
  if (m.dim != x.dim) fail_data("dimension mismatch");
  const GmmEval ev(m);
  std::fill(out, out + 2 * m.k2 * m.dim, 0.0);
  std::vector<double> logp(m.k2);
  for (const std::uint32_t r : rows) {
    const float* row = x.row(r);
    const double lse = detail::point_log_joint(ev, m, row, logp.data());
    detail::to_posteriors(m.k2, lse, logp.data());
    detail::accumulate_fv(ev, m, row, logp.data(), out);
  }
}

}  // namespace fv::ref
