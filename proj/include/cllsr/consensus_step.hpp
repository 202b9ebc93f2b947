#pragma once

#include <cllsr/numerics.hpp>

#include <vector>

namespace cllsr {

/// Consensus affinity together with the rank bound it was projected to.
struct ConsensusMatrix
{
    MatrixXd matrix;
    Index declared_rank_bound = 0;
    /// Squared Frobenius distance to the matrix it was projected from.
    double residual_sq = 0;
};

/// Entrywise mean of the view matrices; the unconstrained minimizer of sum_v ||C - C^v||_F^2.
MatrixXd average_views(const std::vector<MatrixXd>& cs);

/// Best rank-k2 approximation of W in Frobenius norm (truncated SVD via the eigenvectors of W^T W).
ConsensusMatrix truncated_rank_projection(const MatrixXd& w, Index k2);

} // namespace cllsr
