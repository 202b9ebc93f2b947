#pragma once

#include <cllsr/data.hpp>

#include <cstdint>
#include <vector>

namespace cllsr {

/// ([C]_+ + [C]_+^T) / 2: a symmetric nonnegative affinity.
MatrixXd fuse(const MatrixXd& c_star);

struct KMeansResult
{
    Labels labels;
    MatrixXd centers;             // k x d
    double objective = 0;         // within-cluster sum of squares
    int best_restart = 0;
    std::vector<double> history;  // objective after each Lloyd iteration of the best restart
};

/// Within-cluster sum of squared distances to the cluster means.
double kmeans_objective(const MatrixXd& points, const Labels& labels, int k);

/*
 * Lloyd's algorithm on the rows of `points` (n x d) with k-means++ seeding,
 * best of `restarts` by objective (ties: earliest restart).
 */
KMeansResult kmeans(const MatrixXd& points, int k, int restarts, std::uint64_t seed);

struct SpectralOptions
{
    int restarts = 20;
    double degree_guard = 1e-12;
};

/// Row-normalized eigenvector embedding of the symmetric normalized Laplacian.
MatrixXd spectral_embedding(const MatrixXd& affinity, int k, double degree_guard = 1e-12);

Labels spectral_clustering(const MatrixXd& affinity, int k, std::uint64_t seed,
                           const SpectralOptions& opts = {});

} // namespace cllsr
