#include "fv/encode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "fv/common.hpp"
#include "fv/kernels.hpp"
#include "fv/kmeans.hpp"

namespace fv {
namespace {

void check_power(double p) {
  if (!(p > 0.0 && p <= 1.0))
    fail_usage("power exponent must be in (0, 1]");
}

// Applies the 1/(N sqrt(pi_k)) and 1/(N sqrt(2 pi_k)) prefactors to the
// Eq.(2)/(3) inner sums.
void scale_fv(const GmmModel& m, std::size_t count, double* values) {
  const std::size_t d = m.dim;
  const double inv_n = 1.0 / static_cast<double>(count);
  double* mu_half = values;
  double* sig_half = values + m.k2 * d;
  for (std::size_t k = 0; k < m.k2; ++k) {
    const double s_mu = inv_n / std::sqrt(m.weights[k]);
    const double s_sig = inv_n / std::sqrt(2.0 * m.weights[k]);
    for (std::size_t j = 0; j < d; ++j) {
      mu_half[k * d + j] *= s_mu;
      sig_half[k * d + j] *= s_sig;
    }
  }
}

void power_span(std::span<double> v, double p) {
  if (p == 1.0) return;
  for (double& z : v) z = std::copysign(std::pow(std::abs(z), p), z);
}

void l2_span(std::span<double> v) {
  double norm2 = 0.0;
  for (double z : v) norm2 += z * z;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& z : v) z *= inv;
  }
}

}  // namespace

EncodedVector fv_encode_raw(const GmmModel& m, const DescriptorSet& x) {
  if (m.dim != x.dim)
    fail_data("dimension mismatch between mixture and descriptors");
  if (x.n == 0) fail_data("cannot encode an empty descriptor set");

  EncodedVector v;
  v.k2 = m.k2;
  v.dim = m.dim;
  v.values.resize(2 * m.k2 * m.dim);
  kernels::fv_sums(m, x, v.values.data());
  scale_fv(m, x.n, v.values.data());
  return v;
}

EncodedVector power_normalize(EncodedVector v, double p) {
  check_power(p);
  power_span(v.values, p);
  v.norm.power *= p;
  return v;
}

EncodedVector l2_normalize(EncodedVector v) {
  l2_span(v.values);
  v.norm.l2 = true;
  return v;
}

EncodedVector fv_encode(const GmmModel& m, const DescriptorSet& x, double p) {
  check_power(p);
  return l2_normalize(power_normalize(fv_encode_raw(m, x), p));
}

EncodedVector hfv_encode(const GmmModel& m, const Codebook& cb,
                         const DescriptorSet& x, const HfvOptions& opts) {
  check_power(opts.power);
  if (m.dim != x.dim || cb.dim != x.dim)
    fail_data("dimension mismatch between models and descriptors");
  if (x.n == 0) fail_data("cannot encode an empty descriptor set");

  const Memberships mem = kmeans_assign(cb, x);

  // bucket row indices by cluster (counting sort keeps them in row order)
  std::vector<std::uint32_t> counts(cb.k1, 0);
  for (const std::uint32_t k : mem.assignments) ++counts[k];
  std::vector<std::uint32_t> offsets(cb.k1 + 1, 0);
  std::partial_sum(counts.begin(), counts.end(), offsets.begin() + 1);
  std::vector<std::uint32_t> rows(x.n);
  {
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = 0; i < x.n; ++i)
      rows[cursor[mem.assignments[i]]++] = static_cast<std::uint32_t>(i);
  }

  const std::size_t width = 2 * m.k2 * m.dim;
  EncodedVector acc;
  acc.k2 = m.k2;
  acc.dim = m.dim;
  acc.hfv = true;
  acc.local_normalized = opts.normalize_local;
  acc.global_count = opts.count_norm == CountNorm::global;
  acc.values.assign(width, 0.0);

  std::vector<double> local(width);
  for (std::size_t k = 0; k < cb.k1; ++k) {
    const std::uint32_t lo = offsets[k];
    const std::uint32_t hi = offsets[k + 1];
    if (lo == hi) continue;  // empty cluster contributes nothing

    const std::span<const std::uint32_t> members(rows.data() + lo, hi - lo);
    kernels::fv_sums(m, x, members, local.data());
    const std::size_t count =
        opts.count_norm == CountNorm::per_cluster ? members.size() : x.n;
    scale_fv(m, count, local.data());
    if (opts.normalize_local) {
      power_span(local, opts.power);
      l2_span(local);
    }
    for (std::size_t j = 0; j < width; ++j) acc.values[j] += local[j];
  }

  return l2_normalize(power_normalize(std::move(acc), opts.power));
}

}  // namespace fv
