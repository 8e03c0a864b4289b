#pragma once

#include "fv/types.hpp"

namespace fv {

// Unnormalized improved Fisher vector. First half: per-component mean
// deviations (x - mu)/sigma weighted by the posteriors and scaled by
// 1/(N sqrt(pi_k)); second half: variance deviations ((x - mu)^2/var - 1)
// scaled by 1/(N sqrt(2 pi_k)).
EncodedVector fv_encode_raw(const GmmModel& m, const DescriptorSet& x);

// Componentwise z -> sign(z) |z|^p, p in (0, 1].
EncodedVector power_normalize(EncodedVector v, double p);

// v / ||v||; the zero vector maps to itself.
EncodedVector l2_normalize(EncodedVector v);

// Power then l2 normalization of the raw FV.
EncodedVector fv_encode(const GmmModel& m, const DescriptorSet& x,
                        double p = 0.5);

// Hyper-FV: hard-assign descriptors to codebook clusters, encode each
// non-empty cluster as a local FV, optionally normalize each local FV,
// sum, then power+l2 normalize the sum.
EncodedVector hfv_encode(const GmmModel& m, const Codebook& cb,
                         const DescriptorSet& x, const HfvOptions& opts = {});

}  // namespace fv
