#include <cllsr/parallel.hpp>
#include <cllsr/sparse_step.hpp>

namespace cllsr {

void NpgParams::validate() const
{
    require(L_min > 0 && L_min < L_max, ErrorCode::InvalidArgument, "npg: need 0 < L_min < L_max");
    require(tau > 1, ErrorCode::InvalidArgument, "npg: tau must exceed 1");
    require(c_desc > 0, ErrorCode::InvalidArgument, "npg: c must be positive");
    require(memory >= 0, ErrorCode::InvalidArgument, "npg: memory must be >= 0");
    require(max_iters >= 1, ErrorCode::InvalidArgument, "npg: max_iters must be >= 1");
    require(tol >= 0, ErrorCode::InvalidArgument, "npg: tol must be >= 0");
}

void ColumnProblem::validate() const
{
    require(A.rows() == b.size() && A.cols() == c.size(), ErrorCode::ShapeMismatch,
            "column problem: inconsistent dimensions");
    require(lambda > 0 && sigma > 0, ErrorCode::InvalidArgument,
            "column problem: lambda and sigma must be positive");
}

double ColumnProblem::value(const VectorXd& x) const
{
    return 0.5 * (A * x - b).squaredNorm() + lambda * x.squaredNorm() +
           0.5 * sigma * (x - c).squaredNorm();
}

void ColumnProblem::gradient(const VectorXd& x, VectorXd& grad) const
{
    grad.noalias() = A.transpose() * (A * x - b);
    grad += 2 * lambda * x + sigma * (x - c);
}

ValueGrad column_value_grad(const ColumnProblem& p, const VectorXd& x)
{
    p.validate();
    require(x.size() == p.size(), ErrorCode::ShapeMismatch, "column_value_grad: x has wrong length");
    ValueGrad out{p.value(x), VectorXd(p.size())};
    p.gradient(x, out.grad);
    return out;
}

double bb_initial_step(const VectorXd& s, const VectorXd& g_diff, double L_min, double L_max)
{
    const double ss = s.squaredNorm();
    if (ss == 0) return L_min;
    const double ratio = s.dot(g_diff) / ss;
    if (!std::isfinite(ratio)) return L_min;
    return std::clamp(ratio, L_min, L_max);
}

NpgResult npg_solve(const ColumnProblem& p, const VectorXd& y0, Index k1, const NpgParams& params)
{
    p.validate();
    return npg_minimize(p, y0, k1, params);
}

VectorXd drop_entry(const VectorXd& v, Index i)
{
    VectorXd out(v.size() - 1);
    out.head(i) = v.head(i);
    out.tail(v.size() - 1 - i) = v.tail(v.size() - 1 - i);
    return out;
}

VectorXd insert_zero(const VectorXd& v, Index i)
{
    VectorXd out(v.size() + 1);
    out.head(i) = v.head(i);
    out(i) = 0;
    out.tail(v.size() - i) = v.tail(v.size() - i);
    return out;
}

ViewColumnObjective::ViewColumnObjective(const MatrixXd& x, const MatrixXd* gram, Index column,
                                         VectorXd consensus, double lambda, double sigma)
    : x_(x), gram_(gram), column_(column), consensus_(std::move(consensus)), lambda_(lambda),
      sigma_(sigma)
{}

double ViewColumnObjective::value(const VectorXd& y) const
{
    VectorXd r = -x_.col(column_);
    for (Index j = 0; j < y.size(); ++j)
        if (y(j) != 0) r.noalias() += y(j) * x_.col(full(j));
    return 0.5 * r.squaredNorm() + lambda_ * y.squaredNorm() +
           0.5 * sigma_ * (y - consensus_).squaredNorm();
}

void ViewColumnObjective::gradient(const VectorXd& y, VectorXd& grad) const
{
    const Index n = x_.cols();
    VectorXd h;
    if (gram_) {
        h = -gram_->col(column_);
        for (Index j = 0; j < y.size(); ++j)
            if (y(j) != 0) h.noalias() += y(j) * gram_->col(full(j));
    } else {
        VectorXd r = -x_.col(column_);
        for (Index j = 0; j < y.size(); ++j)
            if (y(j) != 0) r.noalias() += y(j) * x_.col(full(j));
        h.noalias() = x_.transpose() * r;
    }
    grad.resize(n - 1);
    grad.head(column_) = h.head(column_);
    grad.tail(n - 1 - column_) = h.tail(n - 1 - column_);
    grad += 2 * lambda_ * y + sigma_ * (y - consensus_);
}

MatrixXd project_view_feasible(const MatrixXd& c, Index k1)
{
    const Index n = c.cols();
    require(c.rows() == n, ErrorCode::ShapeMismatch, "view matrix must be square");
    require(k1 >= 1 && k1 <= n - 1, ErrorCode::InvalidArgument, "k1 must lie in [1, n-1]");
    MatrixXd out(n, n);
    for (Index i = 0; i < n; ++i)
        out.col(i) = insert_zero(project_nonneg_ksparse(drop_entry(c.col(i), i), k1), i);
    return out;
}

bool is_view_feasible(const MatrixXd& c, Index k1)
{
    if (c.rows() != c.cols()) return false;
    if ((c.diagonal().array() != 0).any()) return false;
    for (Index i = 0; i < c.cols(); ++i)
        if (!in_sparse_nonneg_set(c.col(i), k1)) return false;
    return true;
}

MatrixXd update_view_matrix(const MatrixXd& x, const MatrixXd* gram, const MatrixXd& c_prev,
                            const MatrixXd& c_star, double lambda, double sigma, Index k1,
                            const NpgParams& params, int threads, ViewUpdateStats* stats)
{
    const Index n = x.cols();
    require(c_prev.rows() == n && c_prev.cols() == n && c_star.rows() == n && c_star.cols() == n,
            ErrorCode::ShapeMismatch, "update_view_matrix: affinity matrices must be n x n");
    require(!gram || (gram->rows() == n && gram->cols() == n), ErrorCode::ShapeMismatch,
            "update_view_matrix: Gram matrix must be n x n");
    require(lambda > 0 && sigma > 0, ErrorCode::InvalidArgument,
            "update_view_matrix: lambda and sigma must be positive");
    require(k1 >= 1 && k1 <= n - 1, ErrorCode::InvalidArgument, "k1 must lie in [1, n-1]");
    params.validate();

    MatrixXd c_new(n, n);
    std::vector<NpgResult> results(static_cast<std::size_t>(n));
    NpgParams column_params = params;
    column_params.record_steps = false;
    parallel_for(n, threads, [&](long i) {
        ViewColumnObjective f(x, gram, i, drop_entry(c_star.col(i), i), lambda, sigma);
        const VectorXd y0 = project_nonneg_ksparse(drop_entry(c_prev.col(i), i), k1);
        results[i] = npg_minimize(f, y0, k1, column_params);
        c_new.col(i) = insert_zero(results[i].y, i);
        results[i].y.resize(0);
    });
    if (stats) {
        for (const auto& r : results) {
            stats->npg_iterations += r.iterations;
            stats->backtracks += r.backtracks;
            stats->unconverged_columns += r.converged ? 0 : 1;
        }
    }
    return c_new;
}

MatrixXd update_view_matrix(const MatrixXd& x, const MatrixXd& c_prev, const MatrixXd& c_star,
                            double lambda, double sigma, Index k1, const NpgParams& params,
                            int threads)
{
    if (x.cols() <= kGramSampleLimit) {
        const MatrixXd gram = x.transpose() * x;
        return update_view_matrix(x, &gram, c_prev, c_star, lambda, sigma, k1, params, threads);
    }
    return update_view_matrix(x, nullptr, c_prev, c_star, lambda, sigma, k1, params, threads);
}

} // namespace cllsr
