#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "fv/rng.hpp"
#include "fv/types.hpp"

namespace testutil {

// Fresh directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("fvenc_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path operator/(const std::string& name) const {
    return dir_ / name;
  }

 private:
  std::filesystem::path dir_;
};

inline fv::DescriptorSet random_points(std::size_t n, std::size_t dim,
                                       std::uint64_t seed, double scale = 1.0) {
  fv::Rng rng(seed);
  fv::DescriptorSet x;
  x.n = n;
  x.dim = dim;
  x.data.resize(n * dim);
  for (auto& v : x.data) v = static_cast<float>(scale * rng.normal());
  return x;
}

inline fv::GmmModel random_gmm(std::size_t k2, std::size_t dim,
                               std::uint64_t seed) {
  fv::Rng rng(seed);
  fv::GmmModel m;
  m.k2 = k2;
  m.dim = dim;
  m.weights.resize(k2);
  double total = 0.0;
  for (auto& w : m.weights) {
    w = rng.uniform(0.2, 1.0);
    total += w;
  }
  for (auto& w : m.weights) w /= total;
  m.means.resize(k2 * dim);
  m.variances.resize(k2 * dim);
  for (auto& v : m.means) v = rng.uniform(-2.0, 2.0);
  for (auto& v : m.variances) v = rng.uniform(0.3, 2.5);
  return m;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline bool same_bytes(const std::filesystem::path& a,
                       const std::filesystem::path& b) {
  return read_text(a) == read_text(b);
}

}  // namespace testutil
