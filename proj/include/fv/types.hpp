#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fv {

// One clip's local descriptors, row-major n x dim. Storage is f32 to match
// the on-disk format; all arithmetic promotes to f64.
struct DescriptorSet {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<float> data;

  const float* row(std::size_t i) const { return data.data() + i * dim; }
  float* row(std::size_t i) { return data.data() + i * dim; }
};

struct Codebook {
  std::size_t k1 = 0;
  std::size_t dim = 0;
  std::vector<double> centers;  // k1 x dim

  const double* center(std::size_t k) const { return centers.data() + k * dim; }
};

// Diagonal-covariance Gaussian mixture. weights sum to 1, variances are
// strictly positive.
struct GmmModel {
  std::size_t k2 = 0;
  std::size_t dim = 0;
  std::vector<double> weights;    // k2
  std::vector<double> means;      // k2 x dim
  std::vector<double> variances;  // k2 x dim

  const double* mean(std::size_t k) const { return means.data() + k * dim; }
  const double* variance(std::size_t k) const {
    return variances.data() + k * dim;
  }
};

struct PcaModel {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> mean;   // in_dim
  std::vector<double> basis;  // in_dim x out_dim, orthonormal columns
};

struct Normalization {
  double power = 1.0;  // exponent applied componentwise; 1 = untouched
  bool l2 = false;
};

// FV/HFV encoding: all v_mu blocks (k ascending, d values each) followed by
// all v_sigma blocks; 2*k2*dim values total.
struct EncodedVector {
  std::size_t k2 = 0;
  std::size_t dim = 0;
  Normalization norm;
  bool hfv = false;
  bool local_normalized = false;  // HFV: locals were power+l2 normalized
  bool global_count = false;      // HFV: locals used the global 1/N
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

struct LinearModel {
  std::vector<std::string> classes;
  std::size_t dim = 0;
  std::vector<double> weights;  // classes x dim
  std::vector<double> biases;   // classes
  double c = 0.0;               // regularization constant used at training

  const double* weight(std::size_t k) const { return weights.data() + k * dim; }
};

enum class Split : std::uint8_t { train, test };

struct CorpusItem {
  std::string path;  // descriptor file, resolved against the manifest dir
  std::uint32_t label = 0;
  Split split = Split::train;
};

struct LabeledCorpus {
  std::vector<CorpusItem> items;
  std::vector<std::string> classes;  // label vocabulary, first-appearance order
};

struct Memberships {
  std::vector<std::uint32_t> assignments;  // one per descriptor, in [0, k1)
};

struct Responsibilities {
  std::size_t n = 0;
  std::size_t k2 = 0;
  std::vector<double> q;  // n x k2, rows sum to 1

  const double* row(std::size_t i) const { return q.data() + i * k2; }
};

enum class CountNorm {
  per_cluster,  // each local FV divides by its own cluster's count
  global        // each local FV divides by the clip's total count
};

struct HfvOptions {
  bool normalize_local = true;  // power+l2 each local FV before summation
  double power = 0.5;           // exponent for local and final normalization
  CountNorm count_norm = CountNorm::per_cluster;
};

}  // namespace fv
