#include "fv/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "fv/common.hpp"
#include "kernel_detail.hpp"

namespace fv {

GmmEval::GmmEval(const GmmModel& m) : k2(m.k2), dim(m.dim) {
  log_const.resize(k2);
  inv_var.resize(k2 * dim);
  inv_sigma.resize(k2 * dim);
  const double log_two_pi = std::log(2.0 * 3.14159265358979323846);
  for (std::size_t k = 0; k < k2; ++k) {
    double c = std::log(m.weights[k]) -
               0.5 * static_cast<double>(dim) * log_two_pi;
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = m.variances[k * dim + j];
      c -= 0.5 * std::log(v);
      inv_var[k * dim + j] = 1.0 / v;
      inv_sigma[k * dim + j] = 1.0 / std::sqrt(v);
    }
    log_const[k] = c;
  }
}

}  // namespace fv

namespace fv::kernels {

namespace {

std::size_t block_count(std::size_t n) {
  return n == 0 ? 0 : (n + kReduceBlock - 1) / kReduceBlock;
}

void check_dims(std::size_t a, std::size_t b) {
  if (a != b) fail_data("dimension mismatch");
}

// Shared body for the two fv_sums overloads; get(i) yields row i of the
// iteration space.
template <class GetRow>
void fv_sums_impl(const GmmModel& m, std::size_t count, GetRow get,
                  double* out) {
  const GmmEval ev(m);
  const std::size_t width = 2 * m.k2 * m.dim;
  std::fill(out, out + width, 0.0);

  const std::size_t nb = block_count(count);
  std::vector<double> part(nb * width, 0.0);

#pragma omp parallel
  {
    std::vector<double> logp(m.k2);
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) {
      double* acc = part.data() + static_cast<std::size_t>(b) * width;
      const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
      const std::size_t hi = std::min(count, lo + kReduceBlock);
      for (std::size_t i = lo; i < hi; ++i) {
        const float* x = get(i);
        const double lse = detail::point_log_joint(ev, m, x, logp.data());
        detail::to_posteriors(m.k2, lse, logp.data());
        detail::accumulate_fv(ev, m, x, logp.data(), acc);
      }
    }
  }

  // combine in block order for run-to-run determinism
  for (std::size_t b = 0; b < nb; ++b) {
    const double* acc = part.data() + b * width;
    for (std::size_t j = 0; j < width; ++j) out[j] += acc[j];
  }
}

}  // namespace

void assign_nearest(const Codebook& cb, const DescriptorSet& x,
                    std::uint32_t* out, double* obj) {
  check_dims(cb.dim, x.dim);
  const std::size_t nb = block_count(x.n);
  std::vector<double> part(obj != nullptr ? nb : 0, 0.0);

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = std::min(x.n, lo + kReduceBlock);
    double local = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
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
      local += best;
    }
    if (obj != nullptr) part[b] = local;
  }

  if (obj != nullptr) {
    double total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) total += part[b];
    *obj = total;
  }
}

void posterior_rows(const GmmModel& m, const DescriptorSet& x, double* q) {
  check_dims(m.dim, x.dim);
  const GmmEval ev(m);
#pragma omp parallel
  {
    std::vector<double> logp(m.k2);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(x.n); ++i) {
      const float* row = x.row(static_cast<std::size_t>(i));
      const double lse = detail::point_log_joint(ev, m, row, logp.data());
      detail::to_posteriors(m.k2, lse, logp.data());
      std::copy(logp.begin(), logp.end(),
                q + static_cast<std::size_t>(i) * m.k2);
    }
  }
}

double log_likelihood_sum(const GmmModel& m, const DescriptorSet& x) {
  check_dims(m.dim, x.dim);
  const GmmEval ev(m);
  const std::size_t nb = block_count(x.n);
  std::vector<double> part(nb, 0.0);

#pragma omp parallel
  {
    std::vector<double> logp(m.k2);
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
      const std::size_t hi = std::min(x.n, lo + kReduceBlock);
      double local = 0.0;
      for (std::size_t i = lo; i < hi; ++i)
        local += detail::point_log_joint(ev, m, x.row(i), logp.data());
      part[b] = local;
    }
  }

  double total = 0.0;
  for (std::size_t b = 0; b < nb; ++b) total += part[b];
  return total;
}

GmmStats estep_accumulate(const GmmModel& m, const DescriptorSet& x) {
  check_dims(m.dim, x.dim);
  const GmmEval ev(m);
  const std::size_t k2 = m.k2;
  const std::size_t d = m.dim;
  const std::size_t stride = 1 + k2 + 2 * k2 * d;
  const std::size_t nb = block_count(x.n);
  std::vector<double> part(nb * stride, 0.0);

#pragma omp parallel
  {
    std::vector<double> logp(k2);
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) {
      double* p = part.data() + static_cast<std::size_t>(b) * stride;
      double* pnk = p + 1;
      double* psx = pnk + k2;
      double* psxx = psx + k2 * d;
      const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
      const std::size_t hi = std::min(x.n, lo + kReduceBlock);
      for (std::size_t i = lo; i < hi; ++i) {
        const float* row = x.row(i);
        const double lse = detail::point_log_joint(ev, m, row, logp.data());
        p[0] += lse;
        detail::to_posteriors(k2, lse, logp.data());
        detail::accumulate_estep(ev, row, logp.data(), pnk, psx, psxx);
      }
    }
  }

  GmmStats s;
  s.nk.assign(k2, 0.0);
  s.sx.assign(k2 * d, 0.0);
  s.sxx.assign(k2 * d, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    const double* p = part.data() + b * stride;
    s.loglik += p[0];
    for (std::size_t k = 0; k < k2; ++k) s.nk[k] += p[1 + k];
    const double* psx = p + 1 + k2;
    const double* psxx = psx + k2 * d;
    for (std::size_t j = 0; j < k2 * d; ++j) {
      s.sx[j] += psx[j];
      s.sxx[j] += psxx[j];
    }
  }
  return s;
}

void fv_sums(const GmmModel& m, const DescriptorSet& x, double* out) {
  check_dims(m.dim, x.dim);
  fv_sums_impl(m, x.n, [&](std::size_t i) { return x.row(i); }, out);
}

void fv_sums(const GmmModel& m, const DescriptorSet& x,
             std::span<const std::uint32_t> rows, double* out) {
  check_dims(m.dim, x.dim);
  fv_sums_impl(m, rows.size(), [&](std::size_t i) { return x.row(rows[i]); },
               out);
}

}  // namespace fv::kernels
