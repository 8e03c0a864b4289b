#include "fv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "fv/common.hpp"
#include "fv/encode.hpp"
#include "fv/gmm.hpp"
#include "fv/io.hpp"
#include "fv/kmeans.hpp"
#include "fv/pca.hpp"
#include "fv/rng.hpp"

namespace fv {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void append_points(DescriptorSet& set, const double* center, double spread,
                   std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < set.dim; ++j)
      set.data.push_back(
          static_cast<float>(center[j] + spread * rng.normal()));
    ++set.n;
  }
}

std::vector<double> energy_map(const EncodedVector& v) {
  std::vector<double> e(v.values.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = v.values[i] * v.values[i];
  return e;
}

}  // namespace

ToyConfig default_toy_config() {
  ToyConfig cfg;
  cfg.mixture.k2 = 2;
  cfg.mixture.dim = 2;
  cfg.mixture.weights = {0.5, 0.5};
  cfg.mixture.means = {0.0, 0.0, 4.0, 4.0};
  cfg.mixture.variances = {0.5, 4.0, 0.5, 1.0};
  cfg.cluster_centers = {4.0, 4.5, 2.0, 2.5, 3.5, -0.5};
  return cfg;
}

EnergySplit energy_split(const EncodedVector& v) {
  if (v.values.empty()) fail_data("cannot split the energy of an empty vector");
  const std::size_t half = v.values.size() / 2;
  double first = 0.0, second = 0.0;
  for (std::size_t i = 0; i < half; ++i) first += v.values[i] * v.values[i];
  for (std::size_t i = half; i < v.values.size(); ++i)
    second += v.values[i] * v.values[i];
  const double total = first + second;
  if (std::abs(std::sqrt(total) - 1.0) > 1e-6)
    fail_data("energy split requires an l2-normalized vector");
  EnergySplit s;
  s.e_mean = first / total;
  s.e_cov = second / total;
  return s;
}

double linear_similarity(const EncodedVector& u, const EncodedVector& v) {
  if (u.values.size() != v.values.size())
    fail_data("encoded vector length mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i)
    dot += u.values[i] * v.values[i];
  return dot;
}

ToyReport toy_example(const ToyConfig& cfg) {
  const std::size_t d = cfg.mixture.dim;
  if (d == 0 || cfg.cluster_centers.empty() ||
      cfg.cluster_centers.size() % d != 0)
    fail_data("invalid toy configuration: bad cluster centers");
  if (!(cfg.spread > 0.0) || cfg.points_per_cluster < 1)
    fail_data("invalid toy configuration: spread/count");
  const std::size_t n_clusters = cfg.cluster_centers.size() / d;

  Rng rng(cfg.seed);
  DescriptorSet points;
  points.dim = d;
  for (std::size_t c = 0; c < n_clusters; ++c)
    append_points(points, cfg.cluster_centers.data() + c * d, cfg.spread,
                  cfg.points_per_cluster, rng);

  Codebook cb;
  cb.k1 = n_clusters;
  cb.dim = d;
  cb.centers = cfg.cluster_centers;

  ToyReport report;
  report.fv = fv_encode(cfg.mixture, points, cfg.hfv.power);
  report.hfv = hfv_encode(cfg.mixture, cb, points, cfg.hfv);
  report.fv_split = energy_split(report.fv);
  report.hfv_split = energy_split(report.hfv);
  report.similarity = linear_similarity(report.fv, report.hfv);

  // per-cluster local FVs, normalized for the energy maps
  const Memberships mem = kmeans_assign(cb, points);
  for (std::size_t c = 0; c < n_clusters; ++c) {
    DescriptorSet subset;
    subset.dim = d;
    for (std::size_t i = 0; i < points.n; ++i) {
      if (mem.assignments[i] != c) continue;
      subset.data.insert(subset.data.end(), points.row(i), points.row(i) + d);
      ++subset.n;
    }
    if (subset.n == 0) continue;
    report.cluster_ids.push_back(static_cast<std::uint32_t>(c));
    report.lfvs.push_back(fv_encode(cfg.mixture, subset, cfg.hfv.power));
    report.lfv_splits.push_back(energy_split(report.lfvs.back()));
  }
  return report;
}

std::string format_toy_report(const ToyReport& report) {
  std::string out;
  out += "toy example: fv vs hfv energy distribution\n";
  for (std::size_t i = 0; i < report.lfvs.size(); ++i) {
    out += "  lfv[cluster " + std::to_string(report.cluster_ids[i]) +
           "]: e_mean=" + fmt("%.6f", report.lfv_splits[i].e_mean) +
           " e_cov=" + fmt("%.6f", report.lfv_splits[i].e_cov) + "\n";
  }
  out += "  fv : e_mean=" + fmt("%.6f", report.fv_split.e_mean) +
         " e_cov=" + fmt("%.6f", report.fv_split.e_cov) + "\n";
  out += "  hfv: e_mean=" + fmt("%.6f", report.hfv_split.e_mean) +
         " e_cov=" + fmt("%.6f", report.hfv_split.e_cov) + "\n";
  out += "  similarity(fv,hfv)=" + fmt("%.6f", report.similarity) + "\n";
  return out;
}

void write_toy_csv(const ToyReport& report,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail_data("cannot open for writing: " + path.string());
  out << "vector,component,energy\n";
  const auto dump = [&](const std::string& name, const EncodedVector& v) {
    const auto e = energy_map(v);
    for (std::size_t i = 0; i < e.size(); ++i)
      out << name << ',' << i << ',' << fmt("%.12g", e[i]) << "\n";
  };
  for (std::size_t i = 0; i < report.lfvs.size(); ++i)
    dump("lfv" + std::to_string(report.cluster_ids[i]), report.lfvs[i]);
  dump("fv", report.fv);
  dump("hfv", report.hfv);
  if (!out) fail_data("write failed: " + path.string());
}

SynthConfig standard_synth_config() { return SynthConfig{}; }

LabeledCorpus synth_corpus(const SynthConfig& cfg,
                           const std::filesystem::path& out_dir) {
  if (cfg.classes < 1 || cfg.videos_per_class < 1 || cfg.dim < 1 ||
      cfg.pool < 1 || cfg.protos_per_class < 1 ||
      cfg.protos_per_class > cfg.pool ||
      cfg.train_per_class >= cfg.videos_per_class ||
      cfg.train_per_class < 1 || cfg.clusters_min < 1 ||
      cfg.clusters_max < cfg.clusters_min || cfg.points_min < 1 ||
      cfg.points_max < cfg.points_min || !(cfg.spread > 0.0) ||
      cfg.jitter < 0.0)
    fail_data("invalid synthetic corpus recipe");

  std::filesystem::create_directories(out_dir);
  Rng rng(cfg.seed);

  std::vector<double> pool(cfg.pool * cfg.dim);
  for (double& v : pool) v = rng.uniform(0.0, cfg.base_range);

  std::ofstream manifest(out_dir / "corpus.csv");
  if (!manifest)
    fail_data("cannot open for writing: " + (out_dir / "corpus.csv").string());

  std::vector<double> center(cfg.dim);
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    for (std::size_t v = 0; v < cfg.videos_per_class; ++v) {
      DescriptorSet set;
      set.dim = cfg.dim;
      const std::size_t n_clusters =
          cfg.clusters_min +
          rng.below(cfg.clusters_max - cfg.clusters_min + 1);
      for (std::size_t t = 0; t < n_clusters; ++t) {
        const std::size_t proto_slot = rng.below(cfg.protos_per_class);
        const std::size_t proto =
            (c * cfg.proto_stride + proto_slot) % cfg.pool;
        for (std::size_t j = 0; j < cfg.dim; ++j)
          center[j] = pool[proto * cfg.dim + j] + cfg.jitter * rng.normal();
        const std::size_t n_points =
            cfg.points_min + rng.below(cfg.points_max - cfg.points_min + 1);
        append_points(set, center.data(), cfg.spread, n_points, rng);
      }
      const std::string name =
          "c" + std::to_string(c) + "_v" + std::to_string(v) + ".fvds";
      save_descriptors(set, out_dir / name);
      manifest << name << ",class" << c << ','
               << (v < cfg.train_per_class ? "train" : "test") << "\n";
    }
  }
  manifest.close();
  if (!manifest) fail_data("write failed: corpus manifest");
  return load_labeled_corpus(out_dir / "corpus.csv");
}

PipelineOptions desk_scale_options() {
  PipelineOptions opt;
  opt.sample_count = 20000;
  opt.k1 = 32;
  opt.k2 = 8;
  return opt;
}

PipelineModels train_models(const LabeledCorpus& corpus,
                            const PipelineOptions& opt) {
  std::vector<std::filesystem::path> train_files;
  for (const auto& item : corpus.items)
    if (item.split == Split::train) train_files.emplace_back(item.path);
  if (train_files.empty()) fail_data("corpus has no training items");

  const DescriptorSet sample =
      sample_descriptors(train_files, opt.sample_count, opt.seed);
  const std::size_t out_dim =
      opt.pca_out_dim > 0 ? opt.pca_out_dim
                          : std::max<std::size_t>(1, sample.dim / 2);

  PipelineModels models;
  models.pca = pca_fit(sample, out_dim);
  const DescriptorSet projected = pca_project(models.pca, sample);
  models.codebook = kmeans_fit(projected, opt.k1, opt.seed,
                               opt.kmeans_max_iter, opt.kmeans_tol);
  models.gmm = gmm_fit(projected, opt.k2, opt.seed, opt.gmm_max_iter,
                       opt.gmm_tol, opt.var_floor);
  return models;
}

std::vector<EncodedVector> encode_corpus(const PipelineModels& models,
                                         const LabeledCorpus& corpus,
                                         EncodeMode mode,
                                         const PipelineOptions& opt) {
  std::vector<EncodedVector> out;
  out.reserve(corpus.items.size());
  HfvOptions hfv = opt.hfv;
  hfv.power = opt.power;
  for (const auto& item : corpus.items) {
    const DescriptorSet raw = load_descriptors(item.path);
    const DescriptorSet projected = pca_project(models.pca, raw);
    out.push_back(mode == EncodeMode::fv
                      ? fv_encode(models.gmm, projected, opt.power)
                      : hfv_encode(models.gmm, models.codebook, projected,
                                   hfv));
  }
  return out;
}

Metrics classify_corpus(const LabeledCorpus& corpus,
                        const std::vector<EncodedVector>& encodings,
                        const PipelineOptions& opt) {
  if (encodings.size() != corpus.items.size())
    fail_data("one encoding per corpus item required");
  std::vector<EncodedVector> train_x, test_x;
  std::vector<std::uint32_t> train_y, test_y;
  for (std::size_t i = 0; i < corpus.items.size(); ++i) {
    if (corpus.items[i].split == Split::train) {
      train_x.push_back(encodings[i]);
      train_y.push_back(corpus.items[i].label);
    } else {
      test_x.push_back(encodings[i]);
      test_y.push_back(corpus.items[i].label);
    }
  }
  const LinearModel model = svm_train_ova(train_x, train_y, corpus.classes,
                                          opt.svm_c, opt.seed, opt.svm_epochs);
  return evaluate(model, test_x, test_y);
}

Metrics run_pipeline(const LabeledCorpus& corpus, EncodeMode mode,
                     const PipelineOptions& opt) {
  const PipelineModels models = train_models(corpus, opt);
  const auto encodings = encode_corpus(models, corpus, mode, opt);
  return classify_corpus(corpus, encodings, opt);
}

std::vector<SweepRow> sweep_power(const LabeledCorpus& corpus,
                                  const PipelineModels& models,
                                  std::span<const double> p_grid,
                                  const PipelineOptions& opt) {
  if (p_grid.empty()) fail_usage("empty sweep grid");
  std::vector<SweepRow> rows;
  for (const double p : p_grid) {
    if (!(p > 0.0 && p <= 1.0))
      fail_usage("power exponent must be in (0, 1]");
    PipelineOptions point = opt;
    point.power = p;
    const auto encodings =
        encode_corpus(models, corpus, EncodeMode::fv, point);
    const Metrics m = classify_corpus(corpus, encodings, point);
    rows.push_back({p, m.accuracy, m.mean_ap, opt.seed});
  }
  return rows;
}

std::vector<SweepRow> sweep_codebook(const LabeledCorpus& corpus,
                                     const PcaModel& pca, const GmmModel& gmm,
                                     const DescriptorSet& raw_sample,
                                     std::span<const std::size_t> k1_grid,
                                     const PipelineOptions& opt) {
  if (k1_grid.empty()) fail_usage("empty sweep grid");
  const DescriptorSet projected = pca_project(pca, raw_sample);
  std::vector<SweepRow> rows;
  for (const std::size_t k1 : k1_grid) {
    if (k1 < 1) fail_usage("codebook size must be >= 1");
    PipelineModels models;
    models.pca = pca;
    models.gmm = gmm;
    models.codebook = kmeans_fit(projected, k1, opt.seed, opt.kmeans_max_iter,
                                 opt.kmeans_tol);
    const auto encodings =
        encode_corpus(models, corpus, EncodeMode::hfv, opt);
    const Metrics m = classify_corpus(corpus, encodings, opt);
    rows.push_back(
        {static_cast<double>(k1), m.accuracy, m.mean_ap, opt.seed});
  }
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail_data("cannot open for writing: " + path.string());
  out << "param,accuracy,map,seed\n";
  for (const auto& r : rows)
    out << fmt("%.10g", r.param) << ',' << fmt("%.10g", r.accuracy) << ','
        << fmt("%.10g", r.map) << ',' << r.seed << "\n";
  if (!out) fail_data("write failed: " + path.string());
}

std::string format_metrics(const Metrics& m,
                           const std::vector<std::string>& classes) {
  std::string out;
  out += "accuracy            " + fmt("%.6f", m.accuracy) + "\n";
  out += "mean class accuracy " + fmt("%.6f", m.mean_class_accuracy) + "\n";
  out += "mean AP             " + fmt("%.6f", m.mean_ap) + "\n";
  out += "test items          " + std::to_string(m.test_count) + "\n";
  for (std::size_t k = 0; k < classes.size(); ++k) {
    out += "  " + classes[k] +
           ": accuracy=" + fmt("%.6f", m.per_class_accuracy[k]) +
           " ap=" + fmt("%.6f", m.per_class_ap[k]) + "\n";
  }
  return out;
}

void write_metrics_csv(const Metrics& m,
                       const std::vector<std::string>& classes,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail_data("cannot open for writing: " + path.string());
  out << "metric,class,value\n";
  out << "accuracy,," << fmt("%.10g", m.accuracy) << "\n";
  out << "mean_class_accuracy,," << fmt("%.10g", m.mean_class_accuracy)
      << "\n";
  out << "map,," << fmt("%.10g", m.mean_ap) << "\n";
  for (std::size_t k = 0; k < classes.size(); ++k) {
    out << "class_accuracy," << classes[k] << ','
        << fmt("%.10g", m.per_class_accuracy[k]) << "\n";
    out << "class_ap," << classes[k] << ','
        << fmt("%.10g", m.per_class_ap[k]) << "\n";
  }
  if (!out) fail_data("write failed: " + path.string());
}

}  // namespace fv
