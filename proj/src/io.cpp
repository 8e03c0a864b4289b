#include "fv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <string_view>

#include "fv/common.hpp"
#include "fv/rng.hpp"

namespace fv {
namespace {

constexpr std::uint32_t kFormatVersion = 1;

constexpr std::uint8_t kKindCodebook = 1;
constexpr std::uint8_t kKindGmm = 2;
constexpr std::uint8_t kKindPca = 3;
constexpr std::uint8_t kKindLinear = 4;

// Encoded-record flag bits.
constexpr std::uint32_t kFlagL2 = 1u << 0;
constexpr std::uint32_t kFlagHfv = 1u << 1;
constexpr std::uint32_t kFlagLocalNorm = 1u << 2;
constexpr std::uint32_t kFlagGlobalCount = 1u << 3;

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_data("cannot open file: " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> buf(size);
  if (size > 0) in.read(reinterpret_cast<char*>(buf.data()), size);
  if (!in) fail_data("read failed: " + path.string());
  return buf;
}

// Little-endian cursor over an in-memory file image.
class Cursor {
 public:
  Cursor(const std::vector<unsigned char>& buf, std::string path)
      : p_(buf.data()), n_(buf.size()), path_(std::move(path)) {}

  std::uint8_t u8() {
    need(1);
    return p_[off_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(p_[off_ + i]) << (8 * i);
    off_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p_[off_ + i]) << (8 * i);
    off_ += 8;
    return v;
  }
  float f32() {
    const std::uint32_t u = u32();
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
  double f64() {
    const std::uint64_t u = u64();
    double v;
    std::memcpy(&v, &u, 8);
    return v;
  }
  void f32_array(float* out, std::size_t count) {
    need(count * 4);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t u = 0;
      for (int b = 0; b < 4; ++b)
        u |= std::uint32_t(p_[off_ + i * 4 + b]) << (8 * b);
      std::memcpy(out + i, &u, 4);
    }
    off_ += count * 4;
  }
  void f64_array(double* out, std::size_t count) {
    need(count * 8);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t u = 0;
      for (int b = 0; b < 8; ++b)
        u |= std::uint64_t(p_[off_ + i * 8 + b]) << (8 * b);
      std::memcpy(out + i, &u, 8);
    }
    off_ += count * 8;
  }
  void raw(void* out, std::size_t count) {
    need(count);
    std::memcpy(out, p_ + off_, count);
    off_ += count;
  }
  std::size_t remaining() const { return n_ - off_; }

 private:
  void need(std::size_t count) {
    if (off_ + count > n_)
      fail_data("malformed header or truncated payload: " + path_);
  }
  const unsigned char* p_;
  std::size_t n_;
  std::size_t off_ = 0;
  std::string path_;
};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : out_(path, std::ios::binary), path_(path.string()) {
    if (!out_) fail_data("cannot open for writing: " + path_);
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    u64(u);
  }
  void f32_array(const float* p, std::size_t count) {
    std::vector<unsigned char> buf(count * 4);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t u;
      std::memcpy(&u, p + i, 4);
      for (int b = 0; b < 4; ++b)
        buf[i * 4 + b] = static_cast<unsigned char>(u >> (8 * b));
    }
    bytes(buf.data(), buf.size());
  }
  void f64_array(const double* p, std::size_t count) {
    std::vector<unsigned char> buf(count * 8);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t u;
      std::memcpy(&u, p + i, 8);
      for (int b = 0; b < 8; ++b)
        buf[i * 8 + b] = static_cast<unsigned char>(u >> (8 * b));
    }
    bytes(buf.data(), buf.size());
  }
  void bytes(const void* p, std::size_t count) {
    out_.write(static_cast<const char*>(p),
               static_cast<std::streamsize>(count));
    if (!out_) fail_data("write failed: " + path_);
  }
  void finish() {
    out_.close();
    if (!out_) fail_data("write failed: " + path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
};

template <class T>
void check_finite(const T* p, std::size_t count, const std::string& what) {
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(static_cast<double>(p[i])))
      fail_data("non-finite value in " + what);
  }
}

void validate(const Codebook& m, const std::string& what) {
  if (m.k1 < 1 || m.dim < 1 || m.centers.size() != m.k1 * m.dim)
    fail_data("invariant violation: bad codebook shape in " + what);
  check_finite(m.centers.data(), m.centers.size(), what);
}

void validate(const GmmModel& m, const std::string& what) {
  if (m.k2 < 1 || m.dim < 1 || m.weights.size() != m.k2 ||
      m.means.size() != m.k2 * m.dim || m.variances.size() != m.k2 * m.dim)
    fail_data("invariant violation: bad mixture shape in " + what);
  check_finite(m.weights.data(), m.weights.size(), what);
  check_finite(m.means.data(), m.means.size(), what);
  check_finite(m.variances.data(), m.variances.size(), what);
  double sum = 0.0;
  for (double w : m.weights) {
    if (w <= 0.0) fail_data("invariant violation: non-positive weight in " + what);
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    fail_data("invariant violation: mixture weights do not sum to 1 in " + what);
  for (double v : m.variances) {
    if (v <= 0.0)
      fail_data("invariant violation: non-positive variance in " + what);
  }
}

void validate(const PcaModel& m, const std::string& what) {
  if (m.in_dim < 1 || m.out_dim < 1 || m.out_dim > m.in_dim ||
      m.mean.size() != m.in_dim || m.basis.size() != m.in_dim * m.out_dim)
    fail_data("invariant violation: bad projection shape in " + what);
  check_finite(m.mean.data(), m.mean.size(), what);
  check_finite(m.basis.data(), m.basis.size(), what);
  // columns must be orthonormal
  for (std::size_t a = 0; a < m.out_dim; ++a) {
    for (std::size_t b = a; b < m.out_dim; ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < m.in_dim; ++j)
        dot += m.basis[j * m.out_dim + a] * m.basis[j * m.out_dim + b];
      const double expect = (a == b) ? 1.0 : 0.0;
      if (std::abs(dot - expect) > 1e-8)
        fail_data("invariant violation: basis not orthonormal in " + what);
    }
  }
}

void validate(const LinearModel& m, const std::string& what) {
  if (m.classes.empty() || m.dim < 1 ||
      m.weights.size() != m.classes.size() * m.dim ||
      m.biases.size() != m.classes.size())
    fail_data("invariant violation: bad linear model shape in " + what);
  check_finite(m.weights.data(), m.weights.size(), what);
  check_finite(m.biases.data(), m.biases.size(), what);
}

void write_magic(Writer& w, const char m[4]) { w.bytes(m, 4); }

void expect_magic(Cursor& c, const char expect[4], const std::string& path) {
  char m[4];
  c.raw(m, 4);
  if (std::memcmp(m, expect, 4) != 0)
    fail_data("malformed header: bad magic in " + path);
}

Cursor open_model(const std::vector<unsigned char>& buf,
                  const std::filesystem::path& path, std::uint8_t want_kind) {
  Cursor c(buf, path.string());
  expect_magic(c, "FVMD", path.string());
  const std::uint32_t version = c.u32();
  if (version != kFormatVersion)
    fail_data("version mismatch in " + path.string());
  const std::uint8_t kind = c.u8();
  if (kind != want_kind) fail_data("kind mismatch in " + path.string());
  return c;
}

bool looks_binary(const std::vector<unsigned char>& buf, const char magic[4]) {
  return buf.size() >= 4 && std::memcmp(buf.data(), magic, 4) == 0;
}

DescriptorSet parse_descriptor_csv(const std::vector<unsigned char>& buf,
                                   const std::string& path) {
  DescriptorSet set;
  std::string_view text(reinterpret_cast<const char*>(buf.data()), buf.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view tok = line.substr(
          start, comma == std::string_view::npos ? line.size() - start
                                                 : comma - start);
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      float value = 0.0f;
      const auto [ptr, ec] =
          std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        fail_data("malformed CSV descriptor file: " + path);
      set.data.push_back(value);
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (set.dim == 0) {
      set.dim = fields;
    } else if (fields != set.dim) {
      fail_data("dimension mismatch between rows in " + path);
    }
    ++set.n;
  }
  if (set.n == 0) fail_data("malformed header: empty descriptor file " + path);
  check_finite(set.data.data(), set.data.size(), path);
  return set;
}

}  // namespace

DescriptorSet load_descriptors(const std::filesystem::path& path) {
  const auto buf = read_file(path);
  if (!looks_binary(buf, "FVDS")) return parse_descriptor_csv(buf, path.string());

  Cursor c(buf, path.string());
  expect_magic(c, "FVDS", path.string());
  const std::uint32_t version = c.u32();
  if (version != kFormatVersion)
    fail_data("version mismatch in " + path.string());
  DescriptorSet set;
  set.dim = c.u32();
  if (set.dim < 1) fail_data("malformed header: dim=0 in " + path.string());
  set.n = c.u64();
  if (c.remaining() != set.n * set.dim * 4)
    fail_data("dimension mismatch between header and payload in " +
              path.string());
  set.data.resize(set.n * set.dim);
  c.f32_array(set.data.data(), set.data.size());
  check_finite(set.data.data(), set.data.size(), path.string());
  return set;
}

void save_descriptors(const DescriptorSet& set,
                      const std::filesystem::path& path) {
  if (set.dim < 1 || set.data.size() != set.n * set.dim)
    fail_data("invalid descriptor set shape");
  check_finite(set.data.data(), set.data.size(), "descriptor set");
  Writer w(path);
  write_magic(w, "FVDS");
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(set.dim));
  w.u64(set.n);
  w.f32_array(set.data.data(), set.data.size());
  w.finish();
}

void save_model(const Codebook& model, const std::filesystem::path& path) {
  validate(model, "codebook");
  Writer w(path);
  write_magic(w, "FVMD");
  w.u32(kFormatVersion);
  w.u8(kKindCodebook);
  w.u32(static_cast<std::uint32_t>(model.k1));
  w.u32(static_cast<std::uint32_t>(model.dim));
  w.f64_array(model.centers.data(), model.centers.size());
  w.finish();
}

Codebook load_codebook(const std::filesystem::path& path) {
  const auto buf = read_file(path);
  Cursor c = open_model(buf, path, kKindCodebook);
  Codebook m;
  m.k1 = c.u32();
  m.dim = c.u32();
  m.centers.resize(m.k1 * m.dim);
  c.f64_array(m.centers.data(), m.centers.size());
  validate(m, path.string());
  return m;
}

void save_model(const GmmModel& model, const std::filesystem::path& path) {
  validate(model, "mixture model");
  Writer w(path);
  write_magic(w, "FVMD");
  w.u32(kFormatVersion);
  w.u8(kKindGmm);
  w.u32(static_cast<std::uint32_t>(model.k2));
  w.u32(static_cast<std::uint32_t>(model.dim));
  w.f64_array(model.weights.data(), model.weights.size());
  w.f64_array(model.means.data(), model.means.size());
  w.f64_array(model.variances.data(), model.variances.size());
  w.finish();
}

GmmModel load_gmm(const std::filesystem::path& path) {
  const auto buf = read_file(path);
  Cursor c = open_model(buf, path, kKindGmm);
  GmmModel m;
  m.k2 = c.u32();
  m.dim = c.u32();
  m.weights.resize(m.k2);
  m.means.resize(m.k2 * m.dim);
  m.variances.resize(m.k2 * m.dim);
  c.f64_array(m.weights.data(), m.weights.size());
  c.f64_array(m.means.data(), m.means.size());
  c.f64_array(m.variances.data(), m.variances.size());
  validate(m, path.string());
  return m;
}

void save_model(const PcaModel& model, const std::filesystem::path& path) {
  validate(model, "projection model");
  Writer w(path);
  write_magic(w, "FVMD");
  w.u32(kFormatVersion);
  w.u8(kKindPca);
  w.u32(static_cast<std::uint32_t>(model.in_dim));
  w.u32(static_cast<std::uint32_t>(model.out_dim));
  w.f64_array(model.mean.data(), model.mean.size());
  w.f64_array(model.basis.data(), model.basis.size());
  w.finish();
}

PcaModel load_pca(const std::filesystem::path& path) {
  const auto buf = read_file(path);
  Cursor c = open_model(buf, path, kKindPca);
  PcaModel m;
  m.in_dim = c.u32();
  m.out_dim = c.u32();
  m.mean.resize(m.in_dim);
  m.basis.resize(m.in_dim * m.out_dim);
  c.f64_array(m.mean.data(), m.mean.size());
  c.f64_array(m.basis.data(), m.basis.size());
  validate(m, path.string());
  return m;
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  validate(model, "linear model");
  Writer w(path);
  write_magic(w, "FVMD");
  w.u32(kFormatVersion);
  w.u8(kKindLinear);
  w.u32(static_cast<std::uint32_t>(model.classes.size()));
  w.u64(model.dim);
  for (const auto& name : model.classes) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
  }
  w.f64(model.c);
  w.f64_array(model.biases.data(), model.biases.size());
  w.f64_array(model.weights.data(), model.weights.size());
  w.finish();
}

LinearModel load_linear(const std::filesystem::path& path) {
  const auto buf = read_file(path);
  Cursor c = open_model(buf, path, kKindLinear);
  LinearModel m;
  const std::uint32_t n_classes = c.u32();
  m.dim = c.u64();
  m.classes.resize(n_classes);
  for (auto& name : m.classes) {
    const std::uint32_t len = c.u32();
    name.resize(len);
    c.raw(name.data(), len);
  }
  m.c = c.f64();
  m.biases.resize(n_classes);
  c.f64_array(m.biases.data(), m.biases.size());
  m.weights.resize(std::size_t(n_classes) * m.dim);
  c.f64_array(m.weights.data(), m.weights.size());
  validate(m, path.string());
  return m;
}

void save_encoded(const EncodedVector& v, const std::filesystem::path& path) {
  if (v.values.size() != 2 * v.k2 * v.dim)
    fail_data("invariant violation: encoded length != 2*k2*dim");
  check_finite(v.values.data(), v.values.size(), "encoded vector");
  Writer w(path);
  write_magic(w, "FVEN");
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(v.k2));
  w.u32(static_cast<std::uint32_t>(v.dim));
  w.f64(v.norm.power);
  std::uint32_t flags = 0;
  if (v.norm.l2) flags |= kFlagL2;
  if (v.hfv) flags |= kFlagHfv;
  if (v.local_normalized) flags |= kFlagLocalNorm;
  if (v.global_count) flags |= kFlagGlobalCount;
  w.u32(flags);
  w.f64_array(v.values.data(), v.values.size());
  w.finish();
}

EncodedVector load_encoded(const std::filesystem::path& path) {
  const auto buf = read_file(path);
  Cursor c(buf, path.string());
  expect_magic(c, "FVEN", path.string());
  const std::uint32_t version = c.u32();
  if (version != kFormatVersion)
    fail_data("version mismatch in " + path.string());
  EncodedVector v;
  v.k2 = c.u32();
  v.dim = c.u32();
  v.norm.power = c.f64();
  const std::uint32_t flags = c.u32();
  v.norm.l2 = (flags & kFlagL2) != 0;
  v.hfv = (flags & kFlagHfv) != 0;
  v.local_normalized = (flags & kFlagLocalNorm) != 0;
  v.global_count = (flags & kFlagGlobalCount) != 0;
  v.values.resize(2 * v.k2 * v.dim);
  c.f64_array(v.values.data(), v.values.size());
  check_finite(v.values.data(), v.values.size(), path.string());
  return v;
}

LabeledCorpus load_labeled_corpus(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) fail_data("cannot open manifest: " + manifest.string());
  const auto base = manifest.parent_path();

  LabeledCorpus corpus;
  std::set<std::string> seen_paths;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = manifest.string() + ":" + std::to_string(line_no);

    const std::size_t c1 = line.find(',');
    const std::size_t c2 = (c1 == std::string::npos) ? std::string::npos
                                                     : line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      fail_data("malformed manifest line at " + where);
    const std::string rel = line.substr(0, c1);
    const std::string label = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string split_tag = line.substr(c2 + 1);
    if (rel.empty() || label.empty())
      fail_data("malformed manifest line at " + where);

    CorpusItem item;
    if (split_tag == "train") {
      item.split = Split::train;
    } else if (split_tag == "test") {
      item.split = Split::test;
    } else {
      fail_data("unknown split tag '" + split_tag + "' at " + where);
    }

    const auto resolved = (base / rel).lexically_normal();
    item.path = resolved.string();
    if (!std::filesystem::exists(resolved))
      fail_data("missing descriptor file: " + item.path);
    if (!seen_paths.insert(item.path).second)
      fail_data("duplicate item: " + item.path);

    const auto it =
        std::find(corpus.classes.begin(), corpus.classes.end(), label);
    if (it == corpus.classes.end()) {
      item.label = static_cast<std::uint32_t>(corpus.classes.size());
      corpus.classes.push_back(label);
    } else {
      item.label =
          static_cast<std::uint32_t>(std::distance(corpus.classes.begin(), it));
    }
    corpus.items.push_back(std::move(item));
  }
  return corpus;
}

DescriptorSet sample_descriptors(
    const std::vector<std::filesystem::path>& inputs, std::size_t count,
    std::uint64_t seed) {
  if (inputs.empty()) fail_usage("no input descriptor files");
  if (count == 0) fail_usage("sample count must be positive");

  Rng rng(seed);
  std::size_t dim = 0;
  std::vector<float> rows;           // reservoir, slot-major
  std::vector<std::uint64_t> order;  // global row index per slot
  std::uint64_t gi = 0;

  for (const auto& file : inputs) {
    const DescriptorSet set = load_descriptors(file);
    if (dim == 0) {
      dim = set.dim;
      rows.reserve(std::min<std::size_t>(count, 1 << 20) * dim);
    } else if (set.dim != dim) {
      fail_data("dimension mismatch across inputs: " + file.string());
    }
    for (std::size_t i = 0; i < set.n; ++i, ++gi) {
      if (order.size() < count) {
        order.push_back(gi);
        rows.insert(rows.end(), set.row(i), set.row(i) + dim);
      } else {
        const std::uint64_t j = rng.below(gi + 1);
        if (j < count) {
          order[j] = gi;
          std::copy(set.row(i), set.row(i) + dim, rows.begin() + j * dim);
        }
      }
    }
  }

  std::vector<std::size_t> slots(order.size());
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  std::sort(slots.begin(), slots.end(),
            [&](std::size_t a, std::size_t b) { return order[a] < order[b]; });

  DescriptorSet out;
  out.dim = dim;
  out.n = slots.size();
  out.data.resize(out.n * dim);
  for (std::size_t s = 0; s < slots.size(); ++s)
    std::copy(rows.begin() + slots[s] * dim, rows.begin() + (slots[s] + 1) * dim,
              out.data.begin() + s * dim);
  return out;
}

}  // namespace fv
