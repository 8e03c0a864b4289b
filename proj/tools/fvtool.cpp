#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "fv/analysis.hpp"
#include "fv/common.hpp"
#include "fv/encode.hpp"
#include "fv/gmm.hpp"
#include "fv/io.hpp"
#include "fv/kmeans.hpp"
#include "fv/pca.hpp"
#include "fv/svm.hpp"

namespace fs = std::filesystem;
using namespace fv;

namespace {

using ConfigMap = std::map<std::string, std::string>;

std::string trim(std::string s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t'; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

ConfigMap load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail_data("cannot open config: " + path.string());
  ConfigMap map;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail_data("malformed config line (expected key=value): " + line);
    map[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return map;
}

std::size_t to_size(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    fail_usage("bad value for " + key + ": " + s);
  }
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail_usage("bad value for " + key + ": " + s);
  }
}

bool to_bool(const std::string& s, const std::string& key) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  fail_usage("bad value for " + key + ": " + s);
}

CountNorm to_count_norm(const std::string& s) {
  if (s == "per-cluster") return CountNorm::per_cluster;
  if (s == "global") return CountNorm::global;
  fail_usage("count normalization must be per-cluster or global");
}

// config fills in anything the command line left at its default
template <class T, class F>
void take(const ConfigMap& cfg, const CLI::Option* opt, const char* key,
          T& target, F parse) {
  if (opt != nullptr && opt->count() > 0) return;
  const auto it = cfg.find(key);
  if (it != cfg.end()) target = parse(it->second, key);
}

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  int jobs = 0;
  CLI::Option* seed_opt = nullptr;

  ConfigMap config() const {
    return config_path.empty() ? ConfigMap{} : load_config(config_path);
  }
  void apply_jobs() const {
    if (jobs > 0) omp_set_num_threads(jobs);
  }
};

CommonArgs* add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "key=value config file; flags override it");
  args.seed_opt = cmd->add_option("--seed", args.seed, "RNG seed");
  cmd->add_option("--jobs", args.jobs,
                  "worker threads (1 = bit-reproducible)");
  return &args;
}

struct HfvFlags {
  std::string local_norm = "on";
  std::string count_norm = "per-cluster";
  CLI::Option* local_opt = nullptr;
  CLI::Option* count_opt = nullptr;

  void add(CLI::App* cmd) {
    local_opt = cmd->add_option("--local-norm", local_norm,
                                "power+l2 normalize each local FV (on/off)")
                    ->check(CLI::IsMember({"on", "off"}));
    count_opt =
        cmd->add_option("--count-norm", count_norm,
                        "local FV count normalization (per-cluster/global)")
            ->check(CLI::IsMember({"per-cluster", "global"}));
  }
  HfvOptions resolve(const ConfigMap& cfg, double power) {
    take(cfg, local_opt, "normalize_local", local_norm,
         [](const std::string& s, const char*) { return s; });
    take(cfg, count_opt, "count_norm", count_norm,
         [](const std::string& s, const char*) { return s; });
    HfvOptions opts;
    opts.normalize_local = to_bool(local_norm, "normalize_local");
    opts.count_norm = to_count_norm(count_norm);
    opts.power = power;
    return opts;
  }
};

std::vector<fs::path> to_paths(const std::vector<std::string>& raw) {
  std::vector<fs::path> out;
  out.reserve(raw.size());
  for (const auto& s : raw) out.emplace_back(s);
  return out;
}

int run_sample(const CommonArgs& common, const std::vector<std::string>& inputs,
               const std::string& out, std::size_t count) {
  if (count == 0) fail_usage("sample count must be positive");
  const DescriptorSet sample =
      sample_descriptors(to_paths(inputs), count, common.seed);
  save_descriptors(sample, out);
  std::cerr << "sampled " << sample.n << " of requested " << count
            << " descriptors (dim " << sample.dim << ")\n";
  return 0;
}

struct TrainArgs {
  std::string sample_path;
  std::string out_dir;
  std::size_t k1 = 4000;
  std::size_t k2 = 256;
  std::size_t pca_dim = 0;
  std::size_t kmeans_max_iter = 100;
  double kmeans_tol = 1e-6;
  std::size_t gmm_max_iter = 100;
  double gmm_tol = 1e-6;
  double var_floor = 1e-4;
  CLI::Option* k1_opt = nullptr;
  CLI::Option* k2_opt = nullptr;
  CLI::Option* pca_opt = nullptr;
};

int run_train(const CommonArgs& common, TrainArgs& a) {
  const ConfigMap cfg = common.config();
  take(cfg, a.k1_opt, "k1", a.k1, to_size);
  take(cfg, a.k2_opt, "k2", a.k2, to_size);
  take(cfg, a.pca_opt, "pca_dim", a.pca_dim, to_size);
  take(cfg, common.seed_opt, "seed", const_cast<CommonArgs&>(common).seed,
       to_size);
  take(cfg, nullptr, "kmeans_max_iter", a.kmeans_max_iter, to_size);
  take(cfg, nullptr, "kmeans_tol", a.kmeans_tol, to_double);
  take(cfg, nullptr, "gmm_max_iter", a.gmm_max_iter, to_size);
  take(cfg, nullptr, "gmm_tol", a.gmm_tol, to_double);
  take(cfg, nullptr, "var_floor", a.var_floor, to_double);

  const DescriptorSet sample = load_descriptors(a.sample_path);
  const std::size_t out_dim =
      a.pca_dim > 0 ? a.pca_dim : std::max<std::size_t>(1, sample.dim / 2);

  fs::create_directories(a.out_dir);
  const PcaModel pca = pca_fit(sample, out_dim);
  save_model(pca, fs::path(a.out_dir) / "pca.fvmd");
  const DescriptorSet projected = pca_project(pca, sample);

  const Codebook cb = kmeans_fit(projected, a.k1, common.seed,
                                 a.kmeans_max_iter, a.kmeans_tol);
  save_model(cb, fs::path(a.out_dir) / "codebook.fvmd");

  const GmmModel gmm = gmm_fit(projected, a.k2, common.seed, a.gmm_max_iter,
                               a.gmm_tol, a.var_floor);
  save_model(gmm, fs::path(a.out_dir) / "gmm.fvmd");

  std::cerr << "trained pca(" << sample.dim << "->" << out_dim
            << "), codebook(k1=" << a.k1 << "), gmm(k2=" << a.k2 << ") from "
            << sample.n << " descriptors\n";
  return 0;
}

struct EncodeArgs {
  std::string models_dir;
  std::string out_dir;
  std::string mode = "fv";
  double power = 0.5;
  std::vector<std::string> inputs;
  HfvFlags hfv;
  CLI::Option* power_opt = nullptr;
};

int run_encode(const CommonArgs& common, EncodeArgs& a) {
  const ConfigMap cfg = common.config();
  take(cfg, a.power_opt, "power", a.power, to_double);
  const HfvOptions hfv_opts = a.hfv.resolve(cfg, a.power);

  const PcaModel pca = load_pca(fs::path(a.models_dir) / "pca.fvmd");
  const GmmModel gmm = load_gmm(fs::path(a.models_dir) / "gmm.fvmd");
  Codebook cb;
  if (a.mode == "hfv")
    cb = load_codebook(fs::path(a.models_dir) / "codebook.fvmd");

  fs::create_directories(a.out_dir);
  std::size_t failed = 0;
  for (const auto& input : a.inputs) {
    const fs::path out =
        fs::path(a.out_dir) / (fs::path(input).stem().string() + ".fven");
    try {
      const DescriptorSet raw = load_descriptors(input);
      const DescriptorSet projected = pca_project(pca, raw);
      const EncodedVector enc =
          a.mode == "fv" ? fv_encode(gmm, projected, a.power)
                         : hfv_encode(gmm, cb, projected, hfv_opts);
      save_encoded(enc, out);
    } catch (const FvError& e) {
      std::cerr << "error: " << input << ": " << e.what() << "\n";
      ++failed;
    }
  }
  std::cerr << "encoded " << (a.inputs.size() - failed) << "/"
            << a.inputs.size() << " item(s) as " << a.mode << "\n";
  return failed > 0 ? 2 : 0;
}

struct ClassifyArgs {
  std::string manifest;
  std::string encodings_dir;
  double c = 100.0;
  std::size_t epochs = 50;
  std::string report_csv;
  std::string model_out;
  CLI::Option* c_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
};

int run_classify(const CommonArgs& common, ClassifyArgs& a) {
  const ConfigMap cfg = common.config();
  take(cfg, a.c_opt, "c", a.c, to_double);
  take(cfg, a.epochs_opt, "epochs", a.epochs, to_size);

  const LabeledCorpus corpus = load_labeled_corpus(a.manifest);
  std::vector<EncodedVector> train_x, test_x;
  std::vector<std::uint32_t> train_y, test_y;
  std::size_t expected_len = 0;
  for (const auto& item : corpus.items) {
    const fs::path enc_path =
        fs::path(a.encodings_dir) /
        (fs::path(item.path).stem().string() + ".fven");
    EncodedVector enc = load_encoded(enc_path);
    if (expected_len == 0) expected_len = enc.size();
    if (enc.size() != expected_len)
      fail_data("encoded vector length mismatch: " + enc_path.string());
    if (item.split == Split::train) {
      train_x.push_back(std::move(enc));
      train_y.push_back(item.label);
    } else {
      test_x.push_back(std::move(enc));
      test_y.push_back(item.label);
    }
  }

  const LinearModel model = svm_train_ova(train_x, train_y, corpus.classes,
                                          a.c, common.seed, a.epochs);
  if (!a.model_out.empty()) save_model(model, a.model_out);
  const Metrics metrics = evaluate(model, test_x, test_y);
  if (!a.report_csv.empty())
    write_metrics_csv(metrics, corpus.classes, a.report_csv);
  std::cout << format_metrics(metrics, corpus.classes);
  return 0;
}

struct ToyArgs {
  double spread = 0.3;
  std::size_t points = 200;
  double power = 0.5;
  std::string csv;
  HfvFlags hfv;
  CLI::Option* power_opt = nullptr;
};

int run_toy(const CommonArgs& common, ToyArgs& a) {
  const ConfigMap cfg = common.config();
  take(cfg, a.power_opt, "power", a.power, to_double);

  ToyConfig toy = default_toy_config();
  toy.spread = a.spread;
  toy.points_per_cluster = a.points;
  toy.seed = common.seed;
  toy.hfv = a.hfv.resolve(cfg, a.power);

  const ToyReport report = toy_example(toy);
  if (!a.csv.empty()) write_toy_csv(report, a.csv);
  std::cout << format_toy_report(report);
  return 0;
}

struct SynthArgs {
  std::string out_dir;
  SynthConfig synth;
};

int run_synth(const CommonArgs& common, SynthArgs& a) {
  const ConfigMap cfg = common.config();
  take(cfg, nullptr, "classes", a.synth.classes, to_size);
  take(cfg, nullptr, "videos_per_class", a.synth.videos_per_class, to_size);
  take(cfg, nullptr, "train_per_class", a.synth.train_per_class, to_size);
  take(cfg, nullptr, "dim", a.synth.dim, to_size);
  take(cfg, nullptr, "pool", a.synth.pool, to_size);
  take(cfg, nullptr, "protos_per_class", a.synth.protos_per_class, to_size);
  take(cfg, nullptr, "proto_stride", a.synth.proto_stride, to_size);
  take(cfg, nullptr, "clusters_min", a.synth.clusters_min, to_size);
  take(cfg, nullptr, "clusters_max", a.synth.clusters_max, to_size);
  take(cfg, nullptr, "points_min", a.synth.points_min, to_size);
  take(cfg, nullptr, "points_max", a.synth.points_max, to_size);
  take(cfg, nullptr, "base_range", a.synth.base_range, to_double);
  take(cfg, nullptr, "jitter", a.synth.jitter, to_double);
  take(cfg, nullptr, "spread", a.synth.spread, to_double);
  a.synth.seed = common.seed;

  const LabeledCorpus corpus = synth_corpus(a.synth, a.out_dir);
  std::cerr << "wrote " << corpus.items.size() << " clips ("
            << corpus.classes.size() << " classes) under " << a.out_dir
            << "\n";
  return 0;
}

struct SweepCommonArgs {
  std::string manifest;
  std::string models_dir;
  std::string out_csv;
  double c = 100.0;
  std::size_t epochs = 50;
  double power = 0.5;
  CLI::Option* c_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* power_opt = nullptr;

  PipelineOptions resolve(const CommonArgs& common, const ConfigMap& cfg) {
    take(cfg, c_opt, "c", c, to_double);
    take(cfg, epochs_opt, "epochs", epochs, to_size);
    take(cfg, power_opt, "power", power, to_double);
    PipelineOptions opt;
    opt.svm_c = c;
    opt.svm_epochs = epochs;
    opt.power = power;
    opt.seed = common.seed;
    return opt;
  }
};

void emit_sweep(const std::vector<SweepRow>& rows, const std::string& out_csv) {
  if (!out_csv.empty()) {
    write_sweep_csv(rows, out_csv);
    return;
  }
  std::cout << "param,accuracy,map,seed\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%llu\n", r.param,
                  r.accuracy, r.map, static_cast<unsigned long long>(r.seed));
    std::cout << buf;
  }
}

int run_sweep_power(const CommonArgs& common, SweepCommonArgs& a,
                    const std::vector<double>& grid) {
  const ConfigMap cfg = common.config();
  const PipelineOptions opt = a.resolve(common, cfg);

  const LabeledCorpus corpus = load_labeled_corpus(a.manifest);
  PipelineModels models;
  models.pca = load_pca(fs::path(a.models_dir) / "pca.fvmd");
  models.gmm = load_gmm(fs::path(a.models_dir) / "gmm.fvmd");
  models.codebook = Codebook{1, models.gmm.dim,
                             std::vector<double>(models.gmm.dim, 0.0)};

  const auto rows = sweep_power(corpus, models, grid, opt);
  emit_sweep(rows, a.out_csv);
  return 0;
}

int run_sweep_codebook(const CommonArgs& common, SweepCommonArgs& a,
                       const std::string& sample_path, HfvFlags& hfv,
                       const std::vector<std::size_t>& grid) {
  const ConfigMap cfg = common.config();
  PipelineOptions opt = a.resolve(common, cfg);
  opt.hfv = hfv.resolve(cfg, opt.power);

  const LabeledCorpus corpus = load_labeled_corpus(a.manifest);
  const PcaModel pca = load_pca(fs::path(a.models_dir) / "pca.fvmd");
  const GmmModel gmm = load_gmm(fs::path(a.models_dir) / "gmm.fvmd");
  const DescriptorSet raw_sample = load_descriptors(sample_path);

  const auto rows = sweep_codebook(corpus, pca, gmm, raw_sample, grid, opt);
  emit_sweep(rows, a.out_csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher vector / hyper-Fisher vector encoding toolkit"};
  app.require_subcommand(1);

  // sample
  auto* sample_cmd =
      app.add_subcommand("sample", "seeded uniform subsample of descriptors");
  CommonArgs sample_common;
  add_common(sample_cmd, sample_common);
  std::vector<std::string> sample_inputs;
  std::string sample_out;
  std::size_t sample_count = 100000;
  sample_cmd->add_option("inputs", sample_inputs, "descriptor files")
      ->required();
  sample_cmd->add_option("-o,--out", sample_out, "output descriptor file")
      ->required();
  sample_cmd->add_option("--count", sample_count, "rows to sample");

  // train
  auto* train_cmd =
      app.add_subcommand("train", "fit PCA, codebook and GMM from a sample");
  CommonArgs train_common;
  add_common(train_cmd, train_common);
  TrainArgs train_args;
  train_cmd->add_option("--sample", train_args.sample_path,
                        "training descriptor sample")
      ->required();
  train_cmd->add_option("--out-dir", train_args.out_dir, "model directory")
      ->required();
  train_args.k1_opt =
      train_cmd->add_option("--k1", train_args.k1, "codebook size");
  train_args.k2_opt =
      train_cmd->add_option("--k2", train_args.k2, "mixture size");
  train_args.pca_opt = train_cmd->add_option(
      "--pca-dim", train_args.pca_dim, "projection dim (0 = half input dim)");

  // encode
  auto* encode_cmd =
      app.add_subcommand("encode", "encode descriptor files as FV or HFV");
  CommonArgs encode_common;
  add_common(encode_cmd, encode_common);
  EncodeArgs encode_args;
  encode_cmd->add_option("--models", encode_args.models_dir, "model directory")
      ->required();
  encode_cmd->add_option("--out-dir", encode_args.out_dir, "output directory")
      ->required();
  encode_cmd->add_option("--mode", encode_args.mode, "fv or hfv")
      ->check(CLI::IsMember({"fv", "hfv"}));
  encode_args.power_opt =
      encode_cmd->add_option("--power", encode_args.power, "power exponent");
  encode_args.hfv.add(encode_cmd);
  encode_cmd->add_option("inputs", encode_args.inputs, "descriptor files")
      ->required();

  // classify
  auto* classify_cmd = app.add_subcommand(
      "classify", "train one-vs-all linear SVM and report metrics");
  CommonArgs classify_common;
  add_common(classify_cmd, classify_common);
  ClassifyArgs classify_args;
  classify_cmd
      ->add_option("--manifest", classify_args.manifest, "corpus manifest")
      ->required();
  classify_cmd
      ->add_option("--encodings", classify_args.encodings_dir,
                   "directory of .fven records")
      ->required();
  classify_args.c_opt =
      classify_cmd->add_option("--c", classify_args.c, "SVM C");
  classify_args.epochs_opt = classify_cmd->add_option(
      "--epochs", classify_args.epochs, "training epochs");
  classify_cmd->add_option("--report-csv", classify_args.report_csv,
                           "metrics CSV path");
  classify_cmd->add_option("--model-out", classify_args.model_out,
                           "save trained model here");

  // toy
  auto* toy_cmd =
      app.add_subcommand("toy", "run the two-Gaussian three-cluster example");
  CommonArgs toy_common;
  add_common(toy_cmd, toy_common);
  ToyArgs toy_args;
  toy_cmd->add_option("--spread", toy_args.spread, "cluster spread");
  toy_cmd->add_option("--points", toy_args.points, "points per cluster");
  toy_args.power_opt =
      toy_cmd->add_option("--power", toy_args.power, "power exponent");
  toy_cmd->add_option("--csv", toy_args.csv, "energy map CSV path");
  toy_args.hfv.add(toy_cmd);

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic labeled corpus");
  CommonArgs synth_common;
  add_common(synth_cmd, synth_common);
  SynthArgs synth_args;
  synth_cmd->add_option("--out", synth_args.out_dir, "corpus directory")
      ->required();
  synth_cmd->add_option("--classes", synth_args.synth.classes, "class count");
  synth_cmd->add_option("--videos-per-class", synth_args.synth.videos_per_class,
                        "clips per class");
  synth_cmd->add_option("--train-per-class", synth_args.synth.train_per_class,
                        "training clips per class");
  synth_cmd->add_option("--dim", synth_args.synth.dim, "descriptor dim");
  synth_cmd->add_option("--pool", synth_args.synth.pool, "prototype pool size");
  synth_cmd->add_option("--protos-per-class",
                        synth_args.synth.protos_per_class,
                        "prototypes per class");
  synth_cmd->add_option("--proto-stride", synth_args.synth.proto_stride,
                        "class prototype stride");
  synth_cmd->add_option("--spread", synth_args.synth.spread, "point spread");
  synth_cmd->add_option("--jitter", synth_args.synth.jitter,
                        "cluster-center jitter");

  // sweep-power
  auto* sp_cmd = app.add_subcommand(
      "sweep-power", "accuracy vs power exponent for FV encoding");
  CommonArgs sp_common;
  add_common(sp_cmd, sp_common);
  SweepCommonArgs sp_args;
  std::vector<double> sp_grid = {0.1, 0.15, 0.2, 0.25, 0.3,
                                 0.35, 0.4, 0.45, 0.5};
  sp_cmd->add_option("--manifest", sp_args.manifest, "corpus manifest")
      ->required();
  sp_cmd->add_option("--models", sp_args.models_dir, "model directory")
      ->required();
  sp_cmd->add_option("--grid", sp_grid, "power grid")->delimiter(',');
  sp_cmd->add_option("--out", sp_args.out_csv, "CSV path (stdout if omitted)");
  sp_args.c_opt = sp_cmd->add_option("--c", sp_args.c, "SVM C");
  sp_args.epochs_opt =
      sp_cmd->add_option("--epochs", sp_args.epochs, "training epochs");

  // sweep-codebook
  auto* sc_cmd = app.add_subcommand(
      "sweep-codebook", "accuracy vs codebook size for HFV encoding");
  CommonArgs sc_common;
  add_common(sc_cmd, sc_common);
  SweepCommonArgs sc_args;
  HfvFlags sc_hfv;
  std::string sc_sample;
  std::vector<std::size_t> sc_grid = {500, 1000, 2000, 4000};
  sc_cmd->add_option("--manifest", sc_args.manifest, "corpus manifest")
      ->required();
  sc_cmd->add_option("--models", sc_args.models_dir, "model directory")
      ->required();
  sc_cmd->add_option("--sample", sc_sample, "raw training sample (for codebook refits)")
      ->required();
  sc_cmd->add_option("--grid", sc_grid, "codebook size grid")->delimiter(',');
  sc_cmd->add_option("--out", sc_args.out_csv, "CSV path (stdout if omitted)");
  sc_args.c_opt = sc_cmd->add_option("--c", sc_args.c, "SVM C");
  sc_args.epochs_opt =
      sc_cmd->add_option("--epochs", sc_args.epochs, "training epochs");
  sc_args.power_opt =
      sc_cmd->add_option("--power", sc_args.power, "power exponent");
  sc_hfv.add(sc_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(sample_cmd)) {
      sample_common.apply_jobs();
      return run_sample(sample_common, sample_inputs, sample_out,
                        sample_count);
    }
    if (app.got_subcommand(train_cmd)) {
      train_common.apply_jobs();
      return run_train(train_common, train_args);
    }
    if (app.got_subcommand(encode_cmd)) {
      encode_common.apply_jobs();
      return run_encode(encode_common, encode_args);
    }
    if (app.got_subcommand(classify_cmd)) {
      classify_common.apply_jobs();
      return run_classify(classify_common, classify_args);
    }
    if (app.got_subcommand(toy_cmd)) {
      toy_common.apply_jobs();
      return run_toy(toy_common, toy_args);
    }
    if (app.got_subcommand(synth_cmd)) {
      synth_common.apply_jobs();
      return run_synth(synth_common, synth_args);
    }
    if (app.got_subcommand(sp_cmd)) {
      sp_common.apply_jobs();
      return run_sweep_power(sp_common, sp_args, sp_grid);
    }
    if (app.got_subcommand(sc_cmd)) {
      sc_common.apply_jobs();
      return run_sweep_codebook(sc_common, sc_args, sc_sample, sc_hfv,
                                sc_grid);
    }
  } catch (const FvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
