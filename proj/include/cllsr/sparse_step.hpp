#pragma once

#include <cllsr/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <vector>

namespace cllsr {

/// Step-size and line-search constants of the nonmonotone projected gradient method.
struct NpgParams
{
    double L_min = 1e-10;
    double L_max = 1e10;
    double tau = 3.0;
    double c_desc = 1e-6;
    int memory = 5;
    int max_iters = 200;
    double tol = 1e-6;
    /// Keep every accepted step (iterate, value, reference) in NpgResult::steps.
    bool record_steps = false;

    void validate() const;
};

/*
 * One column of the view subproblem, with the diagonal entry already removed:
 *
 *   f(x) = 1/2 ||A x - b||^2 + lambda ||x||^2 + sigma/2 ||x - c||^2
 *
 * A is the view matrix without column i, b is column i, c is the consensus
 * column without entry i.
 */
struct ColumnProblem
{
    MatrixXd A;
    VectorXd b;
    VectorXd c;
    double lambda = 1.0;
    double sigma = 1.0;

    Index size() const { return A.cols(); }
    void validate() const;

    double value(const VectorXd& x) const;
    void gradient(const VectorXd& x, VectorXd& grad) const;
    /// Strong-convexity modulus 2 lambda + sigma, a lower bound on the curvature.
    double initial_step() const { return 2 * lambda + sigma; }
};

struct ValueGrad
{
    double value;
    VectorXd grad;
};

ValueGrad column_value_grad(const ColumnProblem& p, const VectorXd& x);

/// Strict "larger first, then lower index" order used for top-k selection.
template <class Derived>
std::vector<Index> top_k_indices(const Eigen::MatrixBase<Derived>& z, Index k)
{
    std::vector<Index> idx(static_cast<std::size_t>(z.size()));
    std::iota(idx.begin(), idx.end(), Index(0));
    k = std::clamp<Index>(k, 0, z.size());
    std::nth_element(idx.begin(), idx.begin() + k, idx.end(), [&](Index a, Index b) {
        return z(a) > z(b) || (z(a) == z(b) && a < b);
    });
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
}

/*
 * Euclidean projection onto {y : ||y||_0 <= k1, y >= 0}: keep max(0, z_i) on
 * the k1 largest entries of z, zero elsewhere. Ties go to the lower index.
 */
template <class Derived>
Vector<typename Derived::Scalar> project_nonneg_ksparse(const Eigen::MatrixBase<Derived>& z, Index k1)
{
    using Scalar = typename Derived::Scalar;
    require(k1 >= 1 && k1 <= z.size(), ErrorCode::InvalidArgument,
            "project_nonneg_ksparse: k1 must lie in [1, length]");
    Vector<Scalar> y = Vector<Scalar>::Zero(z.size());
    for (Index i : top_k_indices(z, k1)) y(i) = std::max(Scalar(0), z(i));
    return y;
}

/// True when y has at most k1 nonzeros and no negative entry.
template <class Derived>
bool in_sparse_nonneg_set(const Eigen::MatrixBase<Derived>& y, Index k1)
{
    return (y.array() >= 0).all() && (y.array() != 0).count() <= k1;
}

/// Barzilai-Borwein curvature <s, g_diff> / <s, s> clamped to [L_min, L_max].
double bb_initial_step(const VectorXd& s, const VectorXd& g_diff, double L_min, double L_max);

struct NpgStep
{
    double value;      // f(y^{k+1})
    double reference;  // max of the last memory+1 accepted values
    double step_sq;    // ||y^{k+1} - y^k||^2
    double L;          // accepted step parameter
    VectorXd iterate;  // y^{k+1}
};

struct NpgResult
{
    VectorXd y;
    double value = 0;
    int iterations = 0;
    int backtracks = 0;
    bool converged = false;
    std::vector<NpgStep> steps;
};

/*
 * Nonmonotone projected gradient over the sparse nonnegative set.
 *
 * Objective must provide size(), value(x), gradient(x, g) and initial_step().
 * A trial point is accepted when
 *     f(y+) <= max_{last memory+1} f - c/2 ||y+ - y||^2,
 * otherwise L is multiplied by tau. Later iterations start from the BB step.
 */
template <class Objective>
NpgResult npg_minimize(const Objective& f, const VectorXd& y0, Index k1, const NpgParams& params)
{
    params.validate();
    require(y0.size() == f.size(), ErrorCode::ShapeMismatch, "npg: start point has wrong length");
    require(k1 >= 1 && k1 <= f.size(), ErrorCode::InvalidArgument, "npg: k1 must lie in [1, length]");
    require(in_sparse_nonneg_set(y0, k1), ErrorCode::InvalidArgument,
            "npg: start point must be nonnegative with at most k1 nonzeros");

    const double L_cap = params.L_max * std::pow(params.tau, 50);

    NpgResult res;
    VectorXd y = y0;
    VectorXd grad(f.size());
    VectorXd grad_prev;
    VectorXd s;
    double fy = f.value(y);
    f.gradient(y, grad);
    std::deque<double> history{fy};

    for (int it = 0; it < params.max_iters; ++it) {
        double L = it == 0
                       ? std::clamp(f.initial_step(), params.L_min, params.L_max)
                       : bb_initial_step(s, grad - grad_prev, params.L_min, params.L_max);
        const double reference = *std::max_element(history.begin(), history.end());

        VectorXd trial;
        double f_trial = 0;
        double step_sq = 0;
        for (;;) {
            trial = project_nonneg_ksparse(y - grad / L, k1);
            f_trial = f.value(trial);
            step_sq = (trial - y).squaredNorm();
            if (f_trial <= reference - 0.5 * params.c_desc * step_sq) break;
            L *= params.tau;
            ++res.backtracks;
            require(L <= L_cap, ErrorCode::BacktrackExhausted,
                    "npg: no acceptable step below L_max * tau^50");
        }

        if (params.record_steps) res.steps.push_back({f_trial, reference, step_sq, L, trial});
        ++res.iterations;

        const double y_norm = y.norm();
        s = trial - y;
        y = std::move(trial);
        fy = f_trial;
        grad_prev = grad;
        f.gradient(y, grad);
        history.push_back(fy);
        if (static_cast<int>(history.size()) > params.memory + 1) history.pop_front();

        if (std::sqrt(step_sq) <= params.tol * (1 + y_norm)) {
            res.converged = true;
            break;
        }
    }
    res.y = std::move(y);
    res.value = fy;
    return res;
}

NpgResult npg_solve(const ColumnProblem& p, const VectorXd& y0, Index k1, const NpgParams& params);

/*
 * Column objective for column i of a view, evaluated without materializing
 * the column-deleted matrix. Values use X directly; gradients use the
 * cached Gram matrix X^T X when one is supplied (O(n k1) per call) and
 * plain products with X otherwise (O(m n)).
 */
class ViewColumnObjective
{
public:
    ViewColumnObjective(const MatrixXd& x, const MatrixXd* gram, Index column, VectorXd consensus,
                        double lambda, double sigma);

    Index size() const { return x_.cols() - 1; }
    double value(const VectorXd& y) const;
    void gradient(const VectorXd& y, VectorXd& grad) const;
    double initial_step() const { return 2 * lambda_ + sigma_; }

private:
    Index full(Index j) const { return j < column_ ? j : j + 1; }

    const MatrixXd& x_;
    const MatrixXd* gram_;
    Index column_;
    VectorXd consensus_;
    double lambda_;
    double sigma_;
};

/// Removes entry i from a vector.
VectorXd drop_entry(const VectorXd& v, Index i);
/// Inserts a zero at position i.
VectorXd insert_zero(const VectorXd& v, Index i);

struct ViewUpdateStats
{
    long npg_iterations = 0;
    long backtracks = 0;
    long unconverged_columns = 0;
};

/// Gram matrices are cached only up to this many samples.
inline constexpr Index kGramSampleLimit = 2000;

/*
 * One block update of a view's affinity matrix: every column solves its
 * ColumnProblem by NPG, warm-started from the projected previous column.
 * The result has zero diagonal, nonnegative entries and at most k1
 * nonzeros per column. `gram` may be null.
 */
MatrixXd update_view_matrix(const MatrixXd& x, const MatrixXd* gram, const MatrixXd& c_prev,
                            const MatrixXd& c_star, double lambda, double sigma, Index k1,
                            const NpgParams& params, int threads = 1,
                            ViewUpdateStats* stats = nullptr);

MatrixXd update_view_matrix(const MatrixXd& x, const MatrixXd& c_prev, const MatrixXd& c_star,
                            double lambda, double sigma, Index k1, const NpgParams& params,
                            int threads = 1);

/// Column-wise projection onto the view feasible set (zero diagonal, sparse, nonnegative).
MatrixXd project_view_feasible(const MatrixXd& c, Index k1);

/// Exact check of the view feasible set.
bool is_view_feasible(const MatrixXd& c, Index k1);

} // namespace cllsr
