#pragma once

#include <vector>

#include "fv/types.hpp"

namespace fv {

// Top-out_dim principal directions of the sample covariance, ordered by
// descending eigenvalue. Sign convention: the largest-magnitude component
// of each direction is positive. No whitening.
PcaModel pca_fit(const DescriptorSet& x, std::size_t out_dim);

// Rows mapped to basis^T (x - mean).
DescriptorSet pca_project(const PcaModel& m, const DescriptorSet& x);

// Eigen-decomposition of a symmetric matrix (row-major d x d) by cyclic
// Jacobi rotations. Eigenvalues descend; eigenvectors fill the columns of
// vecs (d x d). Exposed for reuse in the analysis tooling.
void symmetric_eigen(std::vector<double> a, std::size_t d,
                     std::vector<double>& values, std::vector<double>& vecs);

}  // namespace fv
