#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fv/svm.hpp"
#include "fv/types.hpp"

namespace fv {

// ---------------------------------------------------------------------------
// Toy diagnostic: a fixed 2-component 2-d mixture with three feature
// clusters, comparing FV and HFV energy distributions.

struct ToyConfig {
  GmmModel mixture;
  std::vector<double> cluster_centers;  // n_clusters x dim
  double spread = 0.3;                  // isotropic stddev around each center
  std::size_t points_per_cluster = 200;
  std::uint64_t seed = 1;
  HfvOptions hfv;
};

// Two Gaussians at (0,0) and (4,4) with diagonal variances (0.5,4) and
// (0.5,1), equal weights; clusters at (4,4.5), (2,2.5), (3.5,-0.5).
ToyConfig default_toy_config();

struct EnergySplit {
  double e_mean = 0.0;  // fraction of unit energy in the mean-deviation half
  double e_cov = 0.0;
};

struct ToyReport {
  std::vector<std::uint32_t> cluster_ids;  // non-empty clusters, ascending
  std::vector<EncodedVector> lfvs;         // power+l2 normalized local FVs
  EncodedVector fv;
  EncodedVector hfv;
  std::vector<EnergySplit> lfv_splits;
  EnergySplit fv_split;
  EnergySplit hfv_split;
  double similarity = 0.0;  // linear kernel between fv and hfv
};

ToyReport toy_example(const ToyConfig& cfg);

// Requires an l2-normalized input (norm within 1e-6 of 1).
EnergySplit energy_split(const EncodedVector& v);

// Dot product; cosine similarity for l2-normalized inputs.
double linear_similarity(const EncodedVector& u, const EncodedVector& v);

std::string format_toy_report(const ToyReport& report);
void write_toy_csv(const ToyReport& report, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic corpus: a desk-scale stand-in for the video datasets. Each class
// is a set of prototype cluster centers; each clip draws a few clusters near
// its class prototypes and scatters points around them.

struct SynthConfig {
  std::size_t classes = 5;
  std::size_t videos_per_class = 60;
  std::size_t train_per_class = 40;
  std::size_t dim = 8;
  std::size_t pool = 12;             // global prototype pool
  std::size_t protos_per_class = 4;  // prototypes drawn per class
  std::size_t proto_stride = 2;      // stride < protos_per_class -> overlap
  std::size_t clusters_min = 2;
  std::size_t clusters_max = 5;
  std::size_t points_min = 40;
  std::size_t points_max = 80;
  double base_range = 6.0;  // prototypes uniform in [0, base_range]^dim
  double jitter = 0.3;      // cluster-center offset around its prototype
  double spread = 0.25;     // point spread around the cluster center
  std::uint64_t seed = 1;
};

// The corpus used by the robustness studies: overlapping prototypes.
SynthConfig standard_synth_config();

// Writes descriptor files plus corpus.csv under out_dir and returns the
// loaded corpus. Deterministic under the config seed.
LabeledCorpus synth_corpus(const SynthConfig& cfg,
                           const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// End-to-end pipeline: sample -> PCA -> codebook + GMM -> encode -> classify.

enum class EncodeMode { fv, hfv };

struct PipelineOptions {
  std::size_t sample_count = 100000;
  std::size_t pca_out_dim = 0;  // 0 = floor(dim/2)
  std::size_t k1 = 4000;
  std::size_t k2 = 256;
  std::size_t kmeans_max_iter = 100;
  double kmeans_tol = 1e-6;
  std::size_t gmm_max_iter = 100;
  double gmm_tol = 1e-6;
  double var_floor = 1e-4;
  double power = 0.5;
  HfvOptions hfv;
  double svm_c = 100.0;
  std::size_t svm_epochs = 50;
  std::uint64_t seed = 1;
};

// Small models sized for the synthetic corpus.
PipelineOptions desk_scale_options();

struct PipelineModels {
  PcaModel pca;
  Codebook codebook;
  GmmModel gmm;
};

// Samples from the train split, fits PCA on the sample, then codebook and
// GMM on the projected sample.
PipelineModels train_models(const LabeledCorpus& corpus,
                            const PipelineOptions& opt);

// One encoding per corpus item, in corpus order.
std::vector<EncodedVector> encode_corpus(const PipelineModels& models,
                                         const LabeledCorpus& corpus,
                                         EncodeMode mode,
                                         const PipelineOptions& opt);

// Trains one-vs-all on the train split and evaluates on the test split.
Metrics classify_corpus(const LabeledCorpus& corpus,
                        const std::vector<EncodedVector>& encodings,
                        const PipelineOptions& opt);

Metrics run_pipeline(const LabeledCorpus& corpus, EncodeMode mode,
                     const PipelineOptions& opt);

// ---------------------------------------------------------------------------
// Parameter sweeps. Each grid point reuses everything the swept parameter
// does not touch.

struct SweepRow {
  double param = 0.0;
  double accuracy = 0.0;
  double map = 0.0;
  std::uint64_t seed = 0;
};

std::vector<SweepRow> sweep_power(const LabeledCorpus& corpus,
                                  const PipelineModels& models,
                                  std::span<const double> p_grid,
                                  const PipelineOptions& opt);

// Retrains only the codebook per K1, reusing the PCA/GMM and the given raw
// training sample.
std::vector<SweepRow> sweep_codebook(const LabeledCorpus& corpus,
                                     const PcaModel& pca, const GmmModel& gmm,
                                     const DescriptorSet& raw_sample,
                                     std::span<const std::size_t> k1_grid,
                                     const PipelineOptions& opt);

void write_sweep_csv(std::span<const SweepRow> rows,
                     const std::filesystem::path& path);

std::string format_metrics(const Metrics& m,
                           const std::vector<std::string>& classes);
void write_metrics_csv(const Metrics& m,
                       const std::vector<std::string>& classes,
                       const std::filesystem::path& path);

}  // namespace fv
