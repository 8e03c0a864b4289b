#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <numeric>

#include "fv/kernels.hpp"
#include "helpers.hpp"

using namespace fv;

namespace {

double max_abs_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Codebook centers_from(const GmmModel& m) {
  return Codebook{m.k2, m.dim, m.means};
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
  const DescriptorSet x = testutil::random_points(7001, 6, 42, 2.0);
  const GmmModel m = testutil::random_gmm(9, 6, 43);
  const Codebook cb = centers_from(m);

  SUBCASE("assign_nearest") {
    std::vector<std::uint32_t> a(x.n), b(x.n);
    double obj_a = 0.0, obj_b = 0.0;
    kernels::assign_nearest(cb, x, a.data(), &obj_a);
    ref::assign_nearest(cb, x, b.data(), &obj_b);
    CHECK(a == b);
    CHECK(obj_a == doctest::Approx(obj_b).epsilon(1e-12));
  }

  SUBCASE("posterior_rows") {
    std::vector<double> qa(x.n * m.k2), qb(x.n * m.k2);
    kernels::posterior_rows(m, x, qa.data());
    ref::posterior_rows(m, x, qb.data());
    CHECK(qa == qb);  // pure map, bit-identical
  }

  SUBCASE("log_likelihood_sum") {
    const double a = kernels::log_likelihood_sum(m, x);
    const double b = ref::log_likelihood_sum(m, x);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
  }

  SUBCASE("estep_accumulate") {
    const GmmStats a = kernels::estep_accumulate(m, x);
    const GmmStats b = ref::estep_accumulate(m, x);
    CHECK(std::abs(a.loglik - b.loglik) <= 1e-10 * std::abs(b.loglik));
    CHECK(max_abs_diff(a.nk, b.nk) < 1e-9);
    CHECK(max_abs_diff(a.sx, b.sx) < 1e-9);
    CHECK(max_abs_diff(a.sxx, b.sxx) < 1e-9);
  }

  SUBCASE("fv_sums, full and subset") {
    std::vector<double> a(2 * m.k2 * m.dim), b(2 * m.k2 * m.dim);
    kernels::fv_sums(m, x, a.data());
    ref::fv_sums(m, x, b.data());
    CHECK(max_abs_diff(a, b) < 1e-9);

    std::vector<std::uint32_t> rows(x.n / 3);
    for (std::size_t i = 0; i < rows.size(); ++i)
      rows[i] = static_cast<std::uint32_t>(3 * i);
    kernels::fv_sums(m, x, rows, a.data());
    ref::fv_sums(m, x, rows, b.data());
    CHECK(max_abs_diff(a, b) < 1e-9);
  }
}

TEST_CASE("block reduction is identical for any thread count") {
  const DescriptorSet x = testutil::random_points(5000, 5, 7, 1.5);
  const GmmModel m = testutil::random_gmm(6, 5, 8);

  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const GmmStats one = kernels::estep_accumulate(m, x);
  std::vector<double> fv_one(2 * m.k2 * m.dim);
  kernels::fv_sums(m, x, fv_one.data());

  omp_set_num_threads(4);
  const GmmStats four = kernels::estep_accumulate(m, x);
  std::vector<double> fv_four(2 * m.k2 * m.dim);
  kernels::fv_sums(m, x, fv_four.data());
  omp_set_num_threads(saved);

  CHECK(one.loglik == four.loglik);
  CHECK(one.nk == four.nk);
  CHECK(one.sx == four.sx);
  CHECK(one.sxx == four.sxx);
  CHECK(fv_one == fv_four);
}

TEST_CASE("empty input leaves accumulators empty") {
  DescriptorSet x;
  x.n = 0;
  x.dim = 4;
  const GmmModel m = testutil::random_gmm(3, 4, 1);
  const GmmStats s = kernels::estep_accumulate(m, x);
  CHECK(s.loglik == 0.0);
  CHECK(std::accumulate(s.nk.begin(), s.nk.end(), 0.0) == 0.0);
  CHECK(kernels::log_likelihood_sum(m, x) == 0.0);
}
