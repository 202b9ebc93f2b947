#pragma once

#include <cllsr/numerics.hpp>

#include <optional>
#include <vector>

namespace cllsr {

struct InitConfig
{
    int kappa = 5;
    /// Gaussian width; unset selects the median squared distance over neighbor pairs.
    std::optional<double> bandwidth;
};

/// Pairwise squared Euclidean distances between the columns of X.
MatrixXd pairwise_sq_distances(const MatrixXd& x);

/*
 * k-nearest-neighbor Gaussian affinity over the columns of X:
 *   C_ij = exp(-||x_i - x_j||^2 / bandwidth)  if i in knn(j) or j in knn(i), i != j
 *   C_ij = 0                                  otherwise.
 * Neighbor ties are broken by lower sample index.
 */
MatrixXd knn_affinity(const MatrixXd& x, const InitConfig& cfg);

/// Entrywise mean of equally-sized matrices.
MatrixXd init_consensus(const std::vector<MatrixXd>& cs);

} // namespace cllsr
