#include <cllsr/init.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cllsr {

MatrixXd pairwise_sq_distances(const MatrixXd& x)
{
    // Direct differences keep coincident samples at exactly zero distance.
    const Index n = x.cols();
    MatrixXd d = MatrixXd::Zero(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = j + 1; i < n; ++i) d(i, j) = d(j, i) = (x.col(i) - x.col(j)).squaredNorm();
    return d;
}

MatrixXd knn_affinity(const MatrixXd& x, const InitConfig& cfg)
{
    const Index n = x.cols();
    require(cfg.kappa >= 1, ErrorCode::InvalidArgument, "kappa must be >= 1");
    require(n >= cfg.kappa + 1, ErrorCode::TooFewSamples,
            "knn_affinity needs at least kappa + 1 = " + std::to_string(cfg.kappa + 1) +
                " samples, got " + std::to_string(n));
    require(!cfg.bandwidth || *cfg.bandwidth > 0, ErrorCode::InvalidArgument,
            "kernel bandwidth must be positive");

    const MatrixXd d = pairwise_sq_distances(x);

    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> keep =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
    std::vector<Index> order;
    for (Index j = 0; j < n; ++j) {
        order.resize(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Index(0));
        order.erase(order.begin() + j);
        std::partial_sort(order.begin(), order.begin() + cfg.kappa, order.end(),
                          [&](Index a, Index b) {
                              return d(a, j) < d(b, j) || (d(a, j) == d(b, j) && a < b);
                          });
        for (int t = 0; t < cfg.kappa; ++t) {
            keep(order[t], j) = true;
            keep(j, order[t]) = true;
        }
    }

    double bandwidth = 1.0;
    if (cfg.bandwidth) {
        bandwidth = *cfg.bandwidth;
    } else {
        std::vector<double> kept;
        for (Index j = 0; j < n; ++j)
            for (Index i = j + 1; i < n; ++i)
                if (keep(i, j)) kept.push_back(d(i, j));
        auto mid = kept.begin() + kept.size() / 2;
        std::nth_element(kept.begin(), mid, kept.end());
        if (*mid > 0) bandwidth = *mid;
    }

    MatrixXd c = MatrixXd::Zero(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            if (keep(i, j))
                c(i, j) = std::max(std::exp(-d(i, j) / bandwidth),
                                   std::numeric_limits<double>::min());
    return c;
}

MatrixXd init_consensus(const std::vector<MatrixXd>& cs)
{
    require(!cs.empty(), ErrorCode::InvalidArgument, "init_consensus of zero matrices");
    const Index n = cs.front().rows();
    MatrixXd sum = MatrixXd::Zero(n, cs.front().cols());
    for (const auto& c : cs) {
        require(c.rows() == n && c.cols() == n, ErrorCode::ShapeMismatch,
                "init_consensus expects n x n matrices of equal size");
        sum += c;
    }
    return sum / static_cast<double>(cs.size());
}

} // namespace cllsr
