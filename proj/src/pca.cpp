#include "fv/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fv/common.hpp"

namespace fv {

void symmetric_eigen(std::vector<double> a, std::size_t d,
                     std::vector<double>& values, std::vector<double>& vecs) {
  vecs.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) vecs[i * d + i] = 1.0;

  double frob = 0.0;
  for (double v : a) frob += v * v;
  frob = std::sqrt(frob);
  const double stop = std::max(frob, 1.0) * 1e-15;

  const std::size_t max_sweeps = 64;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += 2.0 * a[p * d + q] * a[p * d + q];
    if (std::sqrt(off) <= stop) break;

    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a[p * d + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
        const double t = std::copysign(
            1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0)), theta);
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t i = 0; i < d; ++i) {
          const double aip = a[i * d + p];
          const double aiq = a[i * d + q];
          a[i * d + p] = c * aip - s * aiq;
          a[i * d + q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double api = a[p * d + i];
          const double aqi = a[q * d + i];
          a[p * d + i] = c * api - s * aqi;
          a[q * d + i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double vip = vecs[i * d + p];
          const double viq = vecs[i * d + q];
          vecs[i * d + p] = c * vip - s * viq;
          vecs[i * d + q] = s * vip + c * viq;
        }
      }
    }
  }

  values.resize(d);
  for (std::size_t i = 0; i < d; ++i) values[i] = a[i * d + i];

  // sort columns by descending eigenvalue (stable on ties)
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return values[x] > values[y];
  });
  std::vector<double> sorted_vals(d);
  std::vector<double> sorted_vecs(d * d);
  for (std::size_t c = 0; c < d; ++c) {
    sorted_vals[c] = values[order[c]];
    for (std::size_t r = 0; r < d; ++r)
      sorted_vecs[r * d + c] = vecs[r * d + order[c]];
  }
  values = std::move(sorted_vals);
  vecs = std::move(sorted_vecs);
}

PcaModel pca_fit(const DescriptorSet& x, std::size_t out_dim) {
  if (x.n < 2) fail_data("need at least two points to fit a projection");
  if (out_dim < 1 || out_dim > x.dim)
    fail_data("projection dimension out of range");

  const std::size_t d = x.dim;
  PcaModel m;
  m.in_dim = d;
  m.out_dim = out_dim;
  m.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < x.n; ++i) {
    const float* row = x.row(i);
    for (std::size_t j = 0; j < d; ++j)
      m.mean[j] += static_cast<double>(row[j]);
  }
  for (std::size_t j = 0; j < d; ++j) m.mean[j] /= static_cast<double>(x.n);

  std::vector<double> cov(d * d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < x.n; ++i) {
    const float* row = x.row(i);
    for (std::size_t j = 0; j < d; ++j)
      centered[j] = static_cast<double>(row[j]) - m.mean[j];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) cov[a * d + b] += centered[a] * centered[b];
  }
  const double scale = 1.0 / static_cast<double>(x.n - 1);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov[a * d + b] *= scale;
      cov[b * d + a] = cov[a * d + b];
    }

  std::vector<double> values, vecs;
  symmetric_eigen(std::move(cov), d, values, vecs);

  m.basis.resize(d * out_dim);
  for (std::size_t c = 0; c < out_dim; ++c) {
    // largest-magnitude component positive
    std::size_t arg = 0;
    for (std::size_t r = 1; r < d; ++r)
      if (std::abs(vecs[r * d + c]) > std::abs(vecs[arg * d + c])) arg = r;
    const double sign = vecs[arg * d + c] < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < d; ++r)
      m.basis[r * out_dim + c] = sign * vecs[r * d + c];
  }
  return m;
}

DescriptorSet pca_project(const PcaModel& m, const DescriptorSet& x) {
  if (m.in_dim != x.dim)
    fail_data("dimension mismatch between projection and descriptors");
  DescriptorSet out;
  out.n = x.n;
  out.dim = m.out_dim;
  out.data.resize(out.n * out.dim);

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(x.n); ++i) {
    const float* row = x.row(static_cast<std::size_t>(i));
    float* dst = out.row(static_cast<std::size_t>(i));
    for (std::size_t c = 0; c < m.out_dim; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m.in_dim; ++j)
        acc += (static_cast<double>(row[j]) - m.mean[j]) *
               m.basis[j * m.out_dim + c];
      dst[c] = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace fv
