#include <doctest.h>

#include <cmath>
#include <limits>

#include "fv/common.hpp"
#include "fv/kmeans.hpp"
#include "fv/rng.hpp"
#include "helpers.hpp"

using namespace fv;

namespace {

// three well-separated blobs; separation far above the spread
DescriptorSet three_blobs(std::uint64_t seed, std::size_t per_blob,
                          std::vector<std::vector<double>>& means_out) {
  means_out = {{0.0, 0.0}, {20.0, 0.0}, {0.0, 20.0}};
  Rng rng(seed);
  DescriptorSet x;
  x.dim = 2;
  for (const auto& mean : means_out) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      x.data.push_back(static_cast<float>(mean[0] + 0.5 * rng.normal()));
      x.data.push_back(static_cast<float>(mean[1] + 0.5 * rng.normal()));
      ++x.n;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("k1=1 yields the component-wise mean") {
  const DescriptorSet x = testutil::random_points(257, 3, 5, 2.0);
  const Codebook cb = kmeans_fit(x, 1, 1);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.n; ++i)
      mean += static_cast<double>(x.row(i)[j]);
    mean /= static_cast<double>(x.n);
    CHECK(cb.centers[j] == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("three separated blobs are recovered") {
  std::vector<std::vector<double>> means;
  const DescriptorSet x = three_blobs(77, 200, means);
  const Codebook cb = kmeans_fit(x, 3, 9);

  // match each true mean to its closest recovered center
  for (const auto& mean : means) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 3; ++k) {
      const double dx = cb.centers[k * 2] - mean[0];
      const double dy = cb.centers[k * 2 + 1] - mean[1];
      best = std::min(best, std::sqrt(dx * dx + dy * dy));
    }
    CHECK(best < 0.1);
  }
}

TEST_CASE("k1=N with distinct points reaches objective zero") {
  DescriptorSet x;
  x.n = 6;
  x.dim = 2;
  x.data = {0, 0, 1, 0, 2, 0, 3, 0, 4, 0, 5, 0};
  KmeansStats stats;
  kmeans_fit(x, 6, 3, 100, 1e-6, &stats);
  REQUIRE(!stats.objective.empty());
  CHECK(stats.objective.back() == 0.0);
}

TEST_CASE("objective is non-increasing across Lloyd iterations") {
  const DescriptorSet x = testutil::random_points(2000, 4, 21, 3.0);
  KmeansStats stats;
  kmeans_fit(x, 17, 4, 100, 0.0, &stats);  // tol 0 runs the full budget
  for (std::size_t i = 1; i < stats.objective.size(); ++i)
    CHECK(stats.objective[i] <= stats.objective[i - 1] + 1e-12);
}

TEST_CASE("fixed seed gives bit-identical codebooks") {
  const DescriptorSet x = testutil::random_points(1500, 5, 13, 2.0);
  const Codebook a = kmeans_fit(x, 16, 42);
  const Codebook b = kmeans_fit(x, 16, 42);
  CHECK(a.centers == b.centers);
}

TEST_CASE("fit rejects bad input") {
  const DescriptorSet x = testutil::random_points(5, 2, 1);
  CHECK_THROWS_AS(kmeans_fit(x, 6, 1), FvError);

  DescriptorSet identical;
  identical.n = 10;
  identical.dim = 2;
  identical.data.assign(20, 1.0f);
  CHECK_THROWS_AS(kmeans_fit(identical, 3, 1), FvError);
  // a single cluster on identical points is fine
  const Codebook cb = kmeans_fit(identical, 1, 1);
  CHECK(cb.centers[0] == doctest::Approx(1.0));
}

TEST_CASE("assignment matches the brute-force oracle") {
  const DescriptorSet x = testutil::random_points(3000, 4, 31, 2.0);
  Rng rng(32);
  Codebook cb;
  cb.k1 = 41;
  cb.dim = 4;
  cb.centers.resize(41 * 4);
  for (auto& c : cb.centers) c = rng.uniform(-3.0, 3.0);

  const Memberships got = kmeans_assign(cb, x);
  for (std::size_t i = 0; i < x.n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_k = 0;
    for (std::size_t k = 0; k < cb.k1; ++k) {
      double dist = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        const double diff =
            static_cast<double>(x.row(i)[j]) - cb.centers[k * 4 + j];
        dist += diff * diff;
      }
      if (dist < best) {
        best = dist;
        best_k = static_cast<std::uint32_t>(k);
      }
    }
    REQUIRE(got.assignments[i] == best_k);
  }
}

TEST_CASE("assignment edge cases") {
  Codebook cb;
  cb.k1 = 8;
  cb.dim = 1;
  cb.centers = {0, 1, 2, 3, 4, 5, 6, 7};

  SUBCASE("point equal to a center") {
    DescriptorSet x;
    x.n = 1;
    x.dim = 1;
    x.data = {5.0f};
    CHECK(kmeans_assign(cb, x).assignments[0] == 5);
  }
  SUBCASE("equidistant tie goes to the lower index") {
    // midway between centers 2 and 7
    DescriptorSet x;
    x.n = 1;
    x.dim = 1;
    x.data = {4.5f};
    Codebook two;
    two.k1 = 8;
    two.dim = 1;
    two.centers = {100, 100, 2, 100, 100, 100, 100, 7};
    CHECK(kmeans_assign(two, x).assignments[0] == 2);
  }
  SUBCASE("dimension mismatch") {
    DescriptorSet x;
    x.n = 1;
    x.dim = 2;
    x.data = {1.0f, 2.0f};
    CHECK_THROWS_AS(kmeans_assign(cb, x), FvError);
  }
}
