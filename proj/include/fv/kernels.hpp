#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fv/types.hpp"

namespace fv {

// Per-component constants shared by the mixture kernels: log pi_k plus the
// Gaussian normalizer, and reciprocals of variance / standard deviation.
struct GmmEval {
  std::size_t k2 = 0;
  std::size_t dim = 0;
  std::vector<double> log_const;  // k2: log pi_k - 0.5*sum_j log(2*pi*var_kj)
  std::vector<double> inv_var;    // k2 x dim
  std::vector<double> inv_sigma;  // k2 x dim

  explicit GmmEval(const GmmModel& m);
};

// Soft-count statistics of one E-step pass.
struct GmmStats {
  double loglik = 0.0;     // sum over points of log p(x_i)
  std::vector<double> nk;  // k2
  std::vector<double> sx;  // k2 x dim: sum_i q_ik x_ij
  std::vector<double> sxx; // k2 x dim: sum_i q_ik x_ij^2
};

}  // namespace fv

// OpenMP-parallel inner loops. Reductions run over fixed-size point blocks
// combined in block order, so results are bit-identical for any thread
// count. fv::ref mirrors every signature with plain serial loops.
namespace fv::kernels {

inline constexpr std::size_t kReduceBlock = 2048;

// Nearest center per row under squared Euclidean distance, ties to the
// lowest index. If obj != nullptr it receives the summed min distances.
void assign_nearest(const Codebook& cb, const DescriptorSet& x,
                    std::uint32_t* out, double* obj = nullptr);

// Posterior matrix q (n x k2), one row per point, via log-sum-exp.
void posterior_rows(const GmmModel& m, const DescriptorSet& x, double* q);

// Sum over points of log p(x_i; m).
double log_likelihood_sum(const GmmModel& m, const DescriptorSet& x);

GmmStats estep_accumulate(const GmmModel& m, const DescriptorSet& x);

// Unweighted encoding sums: out holds 2*k2*dim values, the
// sum_i q_ik (x_ij - mu_kj)/sigma_kj blocks followed by the
// sum_i q_ik ((x_ij - mu_kj)^2/var_kj - 1) blocks.
void fv_sums(const GmmModel& m, const DescriptorSet& x, double* out);
void fv_sums(const GmmModel& m, const DescriptorSet& x,
             std::span<const std::uint32_t> rows, double* out);

}  // namespace fv::kernels

// Serial reference implementations kept for testing and as the benchmark
// baseline.
namespace fv::ref {

void assign_nearest(const Codebook& cb, const DescriptorSet& x,
                    std::uint32_t* out, double* obj = nullptr);
void posterior_rows(const GmmModel& m, const DescriptorSet& x, double* q);
double log_likelihood_sum(const GmmModel& m, const DescriptorSet& x);
GmmStats estep_accumulate(const GmmModel& m, const DescriptorSet& x);
void fv_sums(const GmmModel& m, const DescriptorSet& x, double* out);
void fv_sums(const GmmModel& m, const DescriptorSet& x,
             std::span<const std::uint32_t> rows, double* out);

}  // namespace fv::ref
