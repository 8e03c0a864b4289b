#include <doctest.h>

#include <cstring>
#include <fstream>
#include <map>

#include "fv/common.hpp"
#include "fv/io.hpp"
#include "helpers.hpp"

using namespace fv;
using testutil::TempDir;

namespace {

template <class F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const FvError& e) {
    return e.what();
  }
  return "";
}

std::vector<unsigned char> slurp(const std::filesystem::path& p) {
  const auto text = testutil::read_text(p);
  return {text.begin(), text.end()};
}

void spit(const std::filesystem::path& p,
          const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("descriptor binary round trip") {
  TempDir tmp("io");
  DescriptorSet set;
  set.n = 3;
  set.dim = 2;
  set.data = {1.0f, 2.0f, -3.5f, 0.25f, 1e-8f, -7.0f};
  const auto path = tmp / "a.fvds";
  save_descriptors(set, path);

  const DescriptorSet back = load_descriptors(path);
  CHECK(back.n == 3);
  CHECK(back.dim == 2);
  CHECK(back.data == set.data);

  // header layout: magic, version, d, N
  const auto bytes = slurp(path);
  REQUIRE(bytes.size() == 4 + 4 + 4 + 8 + 6 * 4);
  CHECK(std::memcmp(bytes.data(), "FVDS", 4) == 0);
}

TEST_CASE("descriptor round trip keeps empty sets") {
  TempDir tmp("io");
  DescriptorSet set;
  set.n = 0;
  set.dim = 5;
  const auto path = tmp / "empty.fvds";
  save_descriptors(set, path);
  const DescriptorSet back = load_descriptors(path);
  CHECK(back.n == 0);
  CHECK(back.dim == 5);
  CHECK(back.data.empty());
}

TEST_CASE("large descriptor round trip is byte-exact") {
  TempDir tmp("io");
  const DescriptorSet set = testutil::random_points(100000, 64, 99);
  const auto a = tmp / "big_a.fvds";
  const auto b = tmp / "big_b.fvds";
  save_descriptors(set, a);
  const DescriptorSet back = load_descriptors(a);
  CHECK(back.data == set.data);
  save_descriptors(back, b);
  CHECK(testutil::same_bytes(a, b));
}

TEST_CASE("descriptor loader rejects bad input") {
  TempDir tmp("io");
  DescriptorSet set;
  set.n = 2;
  set.dim = 2;
  set.data = {1.0f, 2.0f, 3.0f, 4.0f};
  const auto path = tmp / "bad.fvds";
  save_descriptors(set, path);

  SUBCASE("NaN payload") {
    auto bytes = slurp(path);
    const std::uint32_t nan_bits = 0x7FC00000u;
    std::memcpy(bytes.data() + bytes.size() - 4, &nan_bits, 4);
    spit(path, bytes);
    CHECK(error_of([&] { load_descriptors(path); }).find("non-finite") !=
          std::string::npos);
  }
  SUBCASE("truncated payload") {
    auto bytes = slurp(path);
    bytes.pop_back();
    spit(path, bytes);
    CHECK(error_of([&] { load_descriptors(path); }).find("payload") !=
          std::string::npos);
  }
  SUBCASE("bad magic") {
    auto bytes = slurp(path);
    bytes[0] = 'X';
    spit(path, bytes);
    // no magic and not parseable as CSV either
    CHECK_THROWS_AS(load_descriptors(path), FvError);
  }
}

TEST_CASE("descriptor CSV fallback") {
  TempDir tmp("io");
  const auto path = tmp / "fixture.csv";
  {
    std::ofstream out(path);
    out << "1.5, 2.0\n-3.25,4\n0,0\n";
  }
  const DescriptorSet set = load_descriptors(path);
  CHECK(set.n == 3);
  CHECK(set.dim == 2);
  CHECK(set.data[0] == 1.5f);
  CHECK(set.data[3] == 4.0f);

  {
    std::ofstream out(path);
    out << "1,2\n3\n";
  }
  CHECK(error_of([&] { load_descriptors(path); }).find("dimension") !=
        std::string::npos);

  {
    std::ofstream out(path);
    out << "1,nan\n";
  }
  CHECK(error_of([&] { load_descriptors(path); }).find("non-finite") !=
        std::string::npos);
}

TEST_CASE("model round trips are bit-exact") {
  TempDir tmp("io");

  GmmModel gmm = testutil::random_gmm(4, 3, 7);
  const auto gmm_path = tmp / "m.fvmd";
  save_model(gmm, gmm_path);
  const GmmModel gmm_back = load_gmm(gmm_path);
  CHECK(gmm_back.weights == gmm.weights);
  CHECK(gmm_back.means == gmm.means);
  CHECK(gmm_back.variances == gmm.variances);

  Codebook cb;
  cb.k1 = 3;
  cb.dim = 2;
  cb.centers = {0.0, 1.0, -2.5, 3.5, 4.0, 5.0};
  const auto cb_path = tmp / "cb.fvmd";
  save_model(cb, cb_path);
  const Codebook cb_back = load_codebook(cb_path);
  CHECK(cb_back.centers == cb.centers);

  PcaModel pca;
  pca.in_dim = 2;
  pca.out_dim = 2;
  pca.mean = {0.5, -0.5};
  pca.basis = {1.0, 0.0, 0.0, 1.0};
  const auto pca_path = tmp / "p.fvmd";
  save_model(pca, pca_path);
  const PcaModel pca_back = load_pca(pca_path);
  CHECK(pca_back.basis == pca.basis);

  LinearModel lin;
  lin.classes = {"walk", "run"};
  lin.dim = 4;
  lin.weights = {1, 2, 3, 4, 5, 6, 7, 8};
  lin.biases = {0.5, -0.5};
  lin.c = 100.0;
  const auto lin_path = tmp / "l.fvmd";
  save_model(lin, lin_path);
  const LinearModel lin_back = load_linear(lin_path);
  CHECK(lin_back.classes == lin.classes);
  CHECK(lin_back.weights == lin.weights);
  CHECK(lin_back.biases == lin.biases);
  CHECK(lin_back.c == lin.c);
}

TEST_CASE("model loader rejects kind and invariant violations") {
  TempDir tmp("io");
  const GmmModel gmm = testutil::random_gmm(2, 2, 3);
  const auto path = tmp / "m.fvmd";
  save_model(gmm, path);

  SUBCASE("wrong kind tag") {
    CHECK(error_of([&] { load_codebook(path); }).find("kind mismatch") !=
          std::string::npos);
  }
  SUBCASE("weights must sum to 1") {
    GmmModel bad = gmm;
    for (auto& w : bad.weights) w *= 0.9;
    // save_model validates too, so write the broken payload by hand
    auto bytes = slurp(path);
    // weights live right after magic(4) + version(4) + kind(1) + k2(4) + d(4)
    std::size_t off = 17;
    for (double w : bad.weights) {
      std::uint64_t u;
      std::memcpy(&u, &w, 8);
      for (int b = 0; b < 8; ++b)
        bytes[off++] = static_cast<unsigned char>(u >> (8 * b));
    }
    spit(path, bytes);
    CHECK(error_of([&] { load_gmm(path); }).find("invariant violation") !=
          std::string::npos);
  }
}

TEST_CASE("encoded record round trip") {
  TempDir tmp("io");
  EncodedVector v;
  v.k2 = 2;
  v.dim = 3;
  v.norm.power = 0.5;
  v.norm.l2 = true;
  v.hfv = true;
  v.local_normalized = true;
  v.values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, -0.1, -0.2, -0.3, -0.4, -0.5, -0.6};
  const auto path = tmp / "v.fven";
  save_encoded(v, path);
  const EncodedVector back = load_encoded(path);
  CHECK(back.k2 == v.k2);
  CHECK(back.dim == v.dim);
  CHECK(back.norm.power == v.norm.power);
  CHECK(back.norm.l2 == v.norm.l2);
  CHECK(back.hfv == v.hfv);
  CHECK(back.local_normalized == v.local_normalized);
  CHECK(back.global_count == v.global_count);
  CHECK(back.values == v.values);
}

TEST_CASE("corpus manifest") {
  TempDir tmp("io");
  DescriptorSet set;
  set.n = 1;
  set.dim = 2;
  set.data = {0.0f, 0.0f};
  for (const char* name : {"a.fvds", "b.fvds", "c.fvds", "d.fvds"})
    save_descriptors(set, tmp / name);

  SUBCASE("four items, two classes") {
    const auto manifest = tmp / "m.csv";
    {
      std::ofstream out(manifest);
      out << "a.fvds,jump,train\n"
          << "b.fvds,jump,test\n"
          << "c.fvds,swim,train\n"
          << "d.fvds,swim,test\n";
    }
    const LabeledCorpus corpus = load_labeled_corpus(manifest);
    CHECK(corpus.items.size() == 4);
    CHECK(corpus.classes == std::vector<std::string>{"jump", "swim"});
    CHECK(corpus.items[0].split == Split::train);
    CHECK(corpus.items[1].split == Split::test);
    CHECK(corpus.items[2].label == 1);
  }
  SUBCASE("missing file") {
    const auto manifest = tmp / "m.csv";
    {
      std::ofstream out(manifest);
      out << "a.fvds,jump,train\nnope.fvds,jump,test\n";
    }
    CHECK(error_of([&] { load_labeled_corpus(manifest); }).find("missing") !=
          std::string::npos);
  }
  SUBCASE("duplicate item") {
    const auto manifest = tmp / "m.csv";
    {
      std::ofstream out(manifest);
      out << "a.fvds,jump,train\na.fvds,jump,test\n";
    }
    CHECK(error_of([&] { load_labeled_corpus(manifest); }).find("duplicate") !=
          std::string::npos);
  }
  SUBCASE("unknown split tag") {
    const auto manifest = tmp / "m.csv";
    {
      std::ofstream out(manifest);
      out << "a.fvds,jump,validation\n";
    }
    CHECK(error_of([&] {
            load_labeled_corpus(manifest);
          }).find("unknown split") != std::string::npos);
  }
}

TEST_CASE("corpus counts match an independent scan of the manifest") {
  TempDir tmp("io");
  DescriptorSet set;
  set.n = 1;
  set.dim = 2;
  set.data = {1.0f, 1.0f};

  fv::Rng rng(11);
  const auto manifest = tmp / "m.csv";
  std::map<std::string, std::size_t> expected;
  {
    std::ofstream out(manifest);
    for (int i = 0; i < 200; ++i) {
      const std::string label = "class" + std::to_string(rng.below(5));
      const std::string name = "item" + std::to_string(i) + ".fvds";
      save_descriptors(set, tmp / name);
      out << name << ',' << label << ',' << (i % 4 == 0 ? "test" : "train")
          << "\n";
      ++expected[label];
    }
  }
  const LabeledCorpus corpus = load_labeled_corpus(manifest);
  REQUIRE(corpus.items.size() == 200);
  std::map<std::string, std::size_t> got;
  for (const auto& item : corpus.items) ++got[corpus.classes[item.label]];
  CHECK(got == expected);
}

TEST_CASE("sample_descriptors") {
  TempDir tmp("io");

  SUBCASE("count above total keeps everything in order") {
    DescriptorSet a = testutil::random_points(5, 3, 1);
    DescriptorSet b = testutil::random_points(4, 3, 2);
    save_descriptors(a, tmp / "a.fvds");
    save_descriptors(b, tmp / "b.fvds");
    const DescriptorSet s =
        sample_descriptors({tmp / "a.fvds", tmp / "b.fvds"}, 100, 7);
    REQUIRE(s.n == 9);
    std::vector<float> expect = a.data;
    expect.insert(expect.end(), b.data.begin(), b.data.end());
    CHECK(s.data == expect);
  }

  SUBCASE("same seed, same sample") {
    DescriptorSet a = testutil::random_points(500, 4, 3);
    save_descriptors(a, tmp / "a.fvds");
    const DescriptorSet s1 = sample_descriptors({tmp / "a.fvds"}, 50, 9);
    const DescriptorSet s2 = sample_descriptors({tmp / "a.fvds"}, 50, 9);
    CHECK(s1.data == s2.data);
    CHECK(s1.n == 50);
  }

  SUBCASE("per-file proportions roughly match sizes") {
    // files sized 9:1; marker value distinguishes the source
    DescriptorSet big, small;
    big.dim = small.dim = 1;
    big.n = 90000;
    big.data.assign(90000, 1.0f);
    small.n = 10000;
    small.data.assign(10000, 2.0f);
    save_descriptors(big, tmp / "big.fvds");
    save_descriptors(small, tmp / "small.fvds");
    const DescriptorSet s =
        sample_descriptors({tmp / "big.fvds", tmp / "small.fvds"}, 10000, 5);
    REQUIRE(s.n == 10000);
    std::size_t from_big = 0;
    for (std::size_t i = 0; i < s.n; ++i)
      if (s.data[i] == 1.0f) ++from_big;
    const double frac = static_cast<double>(from_big) / 10000.0;
    CHECK(frac > 0.87);
    CHECK(frac < 0.93);
  }
}
