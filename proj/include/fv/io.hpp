#pragma once

#include <filesystem>
#include <vector>

#include "fv/types.hpp"

namespace fv {

// Descriptor files: binary "FVDS" layout is canonical; plain CSV (one
// descriptor per line) is accepted as a fallback for hand-written fixtures.
DescriptorSet load_descriptors(const std::filesystem::path& path);
void save_descriptors(const DescriptorSet& set,
                      const std::filesystem::path& path);

// Model files share the "FVMD" container with a kind tag per model type.
void save_model(const Codebook& model, const std::filesystem::path& path);
void save_model(const GmmModel& model, const std::filesystem::path& path);
void save_model(const PcaModel& model, const std::filesystem::path& path);
void save_model(const LinearModel& model, const std::filesystem::path& path);

Codebook load_codebook(const std::filesystem::path& path);
GmmModel load_gmm(const std::filesystem::path& path);
PcaModel load_pca(const std::filesystem::path& path);
LinearModel load_linear(const std::filesystem::path& path);

// Encoded vector records ("FVEN").
void save_encoded(const EncodedVector& v, const std::filesystem::path& path);
EncodedVector load_encoded(const std::filesystem::path& path);

// Corpus manifest: one `<relative-path>,<label>,<split>` line per item.
// Paths resolve against the manifest's directory; split is train or test.
LabeledCorpus load_labeled_corpus(const std::filesystem::path& manifest);

// Seeded uniform sample of `count` descriptor rows across the inputs
// (reservoir sampling; output rows keep their original global order).
DescriptorSet sample_descriptors(
    const std::vector<std::filesystem::path>& inputs, std::size_t count,
    std::uint64_t seed);

}  // namespace fv
