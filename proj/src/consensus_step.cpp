#include <cllsr/consensus_step.hpp>

namespace cllsr {

MatrixXd average_views(const std::vector<MatrixXd>& cs)
{
    require(!cs.empty(), ErrorCode::InvalidArgument, "average_views of zero matrices");
    const Index n = cs.front().rows();
    MatrixXd w = MatrixXd::Zero(n, cs.front().cols());
    for (const auto& c : cs) {
        require(c.rows() == n && c.cols() == n, ErrorCode::ShapeMismatch,
                "average_views expects n x n matrices of equal size");
        w += c;
    }
    return w / static_cast<double>(cs.size());
}

ConsensusMatrix truncated_rank_projection(const MatrixXd& w, Index k2)
{
    require(w.rows() == w.cols(), ErrorCode::ShapeMismatch, "consensus matrix must be square");
    require(k2 >= 1 && k2 <= w.rows(), ErrorCode::InvalidArgument, "k2 must lie in [1, n]");
    require(all_finite(w), ErrorCode::NumericalFailure, "consensus input is not finite");
    ConsensusMatrix out;
    out.declared_rank_bound = k2;
    if (k2 == w.rows()) {
        out.matrix = w;
        return out;
    }
    // W V_k V_k^T with V_k the top right singular vectors, taken from the
    // eigenvectors of W^T W; cheaper than a full SVD and the same projection.
    MatrixXd gram = MatrixXd::Zero(w.cols(), w.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(w.transpose());
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
    require(eig.info() == Eigen::Success, ErrorCode::NumericalFailure,
            "eigensolver did not converge in the consensus step");
    const MatrixXd vk = eig.eigenvectors().rightCols(k2);
    out.matrix = (w * vk) * vk.transpose();
    out.residual_sq = (out.matrix - w).squaredNorm();
    return out;
}

} // namespace cllsr
