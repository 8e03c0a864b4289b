#pragma once

#include <cstdint>
#include <vector>

#include "fv/types.hpp"

namespace fv {

struct Prediction {
  std::uint32_t label = 0;
  std::vector<double> scores;  // one per class
};

struct Metrics {
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;
  double mean_class_accuracy = 0.0;
  std::vector<double> per_class_ap;
  double mean_ap = 0.0;
  std::size_t test_count = 0;
};

struct SvmTrainStats {
  // per class, hinge objective before and after training
  std::vector<double> initial_objective;
  std::vector<double> final_objective;
};

// One-vs-all L2-regularized hinge loss, trained per class by deterministic
// epoch-based stochastic subgradient descent (Pegasos-style, bias folded in
// as an augmented coordinate). Each binary problem re-seeds its own RNG
// from `seed`, so classes train identically regardless of order.
LinearModel svm_train_ova(const std::vector<EncodedVector>& xs,
                          const std::vector<std::uint32_t>& ys,
                          const std::vector<std::string>& classes,
                          double c = 100.0, std::uint64_t seed = 1,
                          std::size_t epochs = 50,
                          SvmTrainStats* stats = nullptr);

// argmax of per-class scores, ties toward the lowest class index.
Prediction svm_predict(const LinearModel& m, const EncodedVector& v);

// Overall accuracy, per-class accuracy and AP, their means.
Metrics evaluate(const LinearModel& m, const std::vector<EncodedVector>& xs,
                 const std::vector<std::uint32_t>& ys);

}  // namespace fv
