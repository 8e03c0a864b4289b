#include "fv/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fv/common.hpp"
#include "fv/rng.hpp"

namespace fv {
namespace {

double hinge_objective(const std::vector<double>& v, std::size_t dim,
                       const std::vector<const double*>& rows,
                       const std::vector<double>& y, double lambda) {
  double norm2 = 0.0;
  for (double w : v) norm2 += w * w;
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double dot = v[dim];  // augmented bias coordinate
    for (std::size_t j = 0; j < dim; ++j) dot += v[j] * rows[i][j];
    loss += std::max(0.0, 1.0 - y[i] * dot);
  }
  return 0.5 * lambda * norm2 + loss / static_cast<double>(rows.size());
}

}  // namespace

LinearModel svm_train_ova(const std::vector<EncodedVector>& xs,
                          const std::vector<std::uint32_t>& ys,
                          const std::vector<std::string>& classes,
                          double c, std::uint64_t seed, std::size_t epochs,
                          SvmTrainStats* stats) {
  if (classes.size() < 2) fail_data("need at least two classes");
  if (xs.empty() || xs.size() != ys.size())
    fail_data("training vectors and labels disagree");
  if (!(c > 0.0)) fail_usage("regularization constant must be positive");

  const std::size_t n = xs.size();
  const std::size_t dim = xs[0].size();
  std::vector<const double*> rows(n);
  std::vector<std::size_t> class_count(classes.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (xs[i].size() != dim) fail_data("encoded vector length mismatch");
    if (ys[i] >= classes.size()) fail_data("label out of range");
    rows[i] = xs[i].values.data();
    ++class_count[ys[i]];
  }
  for (std::size_t k = 0; k < classes.size(); ++k)
    if (class_count[k] == 0)
      fail_data("class without training examples: " + classes[k]);

  const double lambda = 1.0 / (c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);

  LinearModel model;
  model.classes = classes;
  model.dim = dim;
  model.c = c;
  model.weights.assign(classes.size() * dim, 0.0);
  model.biases.assign(classes.size(), 0.0);
  if (stats != nullptr) {
    stats->initial_objective.assign(classes.size(), 0.0);
    stats->final_objective.assign(classes.size(), 0.0);
  }

  for (std::size_t k = 0; k < classes.size(); ++k) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = ys[i] == k ? 1.0 : -1.0;

    std::vector<double> v(dim + 1, 0.0);
    if (stats != nullptr)
      stats->initial_objective[k] = hinge_objective(v, dim, rows, y, lambda);

    Rng rng(seed);  // identical stream per class
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::size_t t = 0;
    for (std::size_t e = 0; e < epochs; ++e) {
      rng.shuffle(order);
      for (const std::uint32_t i : order) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        double dot = v[dim];
        const double* xi = rows[i];
        for (std::size_t j = 0; j < dim; ++j) dot += v[j] * xi[j];

        const double decay = 1.0 - 1.0 / static_cast<double>(t);
        for (double& w : v) w *= decay;
        if (y[i] * dot < 1.0) {
          const double step = eta * y[i];
          for (std::size_t j = 0; j < dim; ++j) v[j] += step * xi[j];
          v[dim] += step;
        }
        double norm2 = 0.0;
        for (double w : v) norm2 += w * w;
        if (norm2 > radius * radius) {
          const double shrink = radius / std::sqrt(norm2);
          for (double& w : v) w *= shrink;
        }
      }
    }

    if (stats != nullptr)
      stats->final_objective[k] = hinge_objective(v, dim, rows, y, lambda);
    std::copy(v.begin(), v.begin() + dim, model.weights.begin() + k * dim);
    model.biases[k] = v[dim];
  }
  return model;
}

Prediction svm_predict(const LinearModel& m, const EncodedVector& v) {
  if (v.size() != m.dim) fail_data("encoded vector length mismatch");
  Prediction p;
  p.scores.resize(m.classes.size());
  for (std::size_t k = 0; k < m.classes.size(); ++k) {
    double dot = m.biases[k];
    const double* w = m.weight(k);
    for (std::size_t j = 0; j < m.dim; ++j) dot += w[j] * v.values[j];
    p.scores[k] = dot;
  }
  p.label = 0;
  for (std::size_t k = 1; k < p.scores.size(); ++k)
    if (p.scores[k] > p.scores[p.label])
      p.label = static_cast<std::uint32_t>(k);
  return p;
}

Metrics evaluate(const LinearModel& m, const std::vector<EncodedVector>& xs,
                 const std::vector<std::uint32_t>& ys) {
  if (xs.empty()) fail_data("empty test split");
  if (xs.size() != ys.size()) fail_data("test vectors and labels disagree");
  const std::size_t n = xs.size();
  const std::size_t n_classes = m.classes.size();

  std::vector<std::vector<double>> scores(n);
  std::vector<std::uint32_t> predicted(n);
  for (std::size_t i = 0; i < n; ++i) {
    Prediction p = svm_predict(m, xs[i]);
    predicted[i] = p.label;
    scores[i] = std::move(p.scores);
  }

  Metrics out;
  out.test_count = n;
  out.per_class_accuracy.assign(n_classes, 0.0);
  out.per_class_ap.assign(n_classes, 0.0);

  std::vector<std::size_t> class_total(n_classes, 0);
  std::vector<std::size_t> class_correct(n_classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ++class_total[ys[i]];
    if (predicted[i] == ys[i]) {
      ++correct;
      ++class_correct[ys[i]];
    }
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(n);

  std::size_t present = 0;
  double acc_sum = 0.0;
  for (std::size_t k = 0; k < n_classes; ++k) {
    if (class_total[k] == 0) continue;
    out.per_class_accuracy[k] = static_cast<double>(class_correct[k]) /
                                static_cast<double>(class_total[k]);
    acc_sum += out.per_class_accuracy[k];
    ++present;
  }
  out.mean_class_accuracy = present > 0 ? acc_sum / present : 0.0;

  // AP per class: precision at each positive's rank, averaged
  std::size_t ap_classes = 0;
  double ap_sum = 0.0;
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n_classes; ++k) {
    if (class_total[k] == 0) continue;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return scores[a][k] > scores[b][k];
                     });
    std::size_t positives_seen = 0;
    double ap = 0.0;
    for (std::size_t rank = 0; rank < n; ++rank) {
      if (ys[order[rank]] != k) continue;
      ++positives_seen;
      ap += static_cast<double>(positives_seen) /
            static_cast<double>(rank + 1);
    }
    ap /= static_cast<double>(class_total[k]);
    out.per_class_ap[k] = ap;
    ap_sum += ap;
    ++ap_classes;
  }
  out.mean_ap = ap_classes > 0 ? ap_sum / ap_classes : 0.0;
  return out;
}

}  // namespace fv
