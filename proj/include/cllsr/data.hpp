#pragma once

#include <cllsr/numerics.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cllsr {

using Labels = std::vector<int>;

/// V views of the same n samples; every view is features x samples.
struct MultiviewDataset
{
    std::vector<MatrixXd> views;
    std::optional<Labels> labels;
    std::vector<std::string> names;

    Index num_views() const { return static_cast<Index>(views.size()); }
    Index num_samples() const { return views.empty() ? 0 : views.front().cols(); }
    /// Number of distinct ground-truth classes, 0 without labels.
    int num_classes() const;

    /// Throws ShapeMismatch / InvalidArgument / NumericalFailure on a broken invariant.
    void validate() const;
};

enum class Orientation { SamplesAsRows, SamplesAsColumns };

struct DatasetManifest
{
    std::vector<std::filesystem::path> view_paths;
    std::optional<std::filesystem::path> labels_path;
    Orientation orientation = Orientation::SamplesAsRows;

    /*
     * Reads a key-value manifest:
     *
     *   # comment
     *   view1 = bbc_view1.csv
     *   view2 = bbc_view2.csv
     *   labels = bbc_labels.txt
     *   orientation = samples-as-rows
     *
     * Relative paths are resolved against the manifest's directory.
     */
    static DatasetManifest read(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;
};

MultiviewDataset load_dataset(const DatasetManifest& manifest);

/// Writes views (samples-as-columns), labels and a manifest into `dir`.
DatasetManifest save_dataset(const MultiviewDataset& ds, const std::filesystem::path& dir,
                             const std::string& stem = "view");

/// Target dimension min(100, m_1, ..., m_V, n).
Index preprocess_dimension(const MultiviewDataset& ds);

/// PCA-reduces each view independently to preprocess_dimension(ds) features.
MultiviewDataset preprocess(const MultiviewDataset& ds);

/*
 * Synthetic union-of-subspaces data: for every view and cluster a random
 * orthonormal basis of dimension `subspace_dim` in R^{m_v}; samples are
 * Gaussian combinations of the basis plus iid Gaussian noise of std `noise`.
 * Samples are ordered by cluster. Deterministic for a given seed.
 */
struct SynthOptions
{
    int num_clusters = 3;
    int per_cluster = 50;
    int num_views = 3;
    double noise = 0.01;
    std::uint64_t seed = 7;
    int subspace_dim = 4;
    int base_features = 30;  // view v has base_features + 5 v features
};

MultiviewDataset synthesize_dataset(const SynthOptions& opts);

inline MultiviewDataset synthesize_dataset(int k_c, int per_cluster, int num_views, double noise,
                                           std::uint64_t seed)
{
    SynthOptions opts;
    opts.num_clusters = k_c;
    opts.per_cluster = per_cluster;
    opts.num_views = num_views;
    opts.noise = noise;
    opts.seed = seed;
    return synthesize_dataset(opts);
}

} // namespace cllsr
