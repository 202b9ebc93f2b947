#pragma once

#include <cllsr/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace cllsr {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Index = Eigen::Index;

/// Relative tolerance used for symmetry checks and rank decisions.
inline constexpr double kNumericalTolerance = 1e-10;

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m)
{
    return m.allFinite();
}

template <class Derived>
typename Derived::RealScalar frobenius_norm(const Eigen::MatrixBase<Derived>& m)
{
    return m.norm();
}

template <class Scalar>
struct SvdResult
{
    Matrix<Scalar> U;                // m x r
    Vector<Scalar> singular_values;  // length r, nonincreasing
    Matrix<Scalar> Vt;               // r x n

    Index rank_bound() const { return singular_values.size(); }

    Matrix<Scalar> reconstruct() const
    {
        return U * singular_values.asDiagonal() * Vt;
    }
};

/*
 * Thin SVD with r = min(m, n). Uses divide-and-conquer bidiagonalization,
 * which is accurate to working precision and far cheaper than one-sided
 * Jacobi for the n x n consensus matrices the solver produces.
 */
template <class Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m)
{
    using Scalar = typename Derived::Scalar;
    require(m.rows() >= 1 && m.cols() >= 1, ErrorCode::InvalidArgument, "svd of an empty matrix");
    require(m.allFinite(), ErrorCode::NumericalFailure, "svd input has non-finite entries");

    Eigen::BDCSVD<Matrix<Scalar>> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    require(solver.info() == Eigen::Success, ErrorCode::NumericalFailure, "svd did not converge");

    SvdResult<Scalar> out;
    out.U = solver.matrixU();
    out.singular_values = solver.singularValues();
    out.Vt = solver.matrixV().transpose();
    require(out.U.allFinite() && out.Vt.allFinite() && out.singular_values.allFinite(),
            ErrorCode::NumericalFailure, "svd produced non-finite factors");
    return out;
}

/// Keeps the leading `rank` singular triplets of an SVD.
template <class Scalar>
Matrix<Scalar> truncate(const SvdResult<Scalar>& s, Index rank)
{
    const Index r = std::clamp<Index>(rank, 0, s.rank_bound());
    return s.U.leftCols(r) * s.singular_values.head(r).asDiagonal() * s.Vt.topRows(r);
}

/// Numerical rank: count of singular values above tol * sigma_1.
template <class Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& m, double tol = kNumericalTolerance)
{
    const auto s = svd(m).singular_values;
    if (s.size() == 0 || s(0) == 0) return 0;
    return (s.array() > tol * s(0)).count();
}

template <class Scalar>
struct SymmetricEigs
{
    Vector<Scalar> values;   // ascending
    Matrix<Scalar> vectors;  // columns are orthonormal eigenvectors
};

/// The k smallest eigenpairs of a symmetric matrix.
template <class Derived>
SymmetricEigs<typename Derived::Scalar> symmetric_eigs(const Eigen::MatrixBase<Derived>& m, Index k)
{
    using Scalar = typename Derived::Scalar;
    require(m.rows() == m.cols(), ErrorCode::InvalidArgument, "symmetric_eigs needs a square matrix");
    require(k >= 1 && k <= m.rows(), ErrorCode::InvalidArgument,
            "symmetric_eigs: k must lie in [1, rows]");
    const Scalar scale = std::max<Scalar>(Scalar(1), m.cwiseAbs().maxCoeff());
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= kNumericalTolerance * scale,
            ErrorCode::NotSymmetric, "matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m);
    require(solver.info() == Eigen::Success, ErrorCode::NumericalFailure,
            "symmetric eigendecomposition did not converge");
    return {solver.eigenvalues().head(k), solver.eigenvectors().leftCols(k)};
}

/*
 * Projects the mean-centered samples (columns of X, features x samples)
 * onto the top-d principal directions. Returns a d x n matrix.
 * Directions are sign-normalized so their largest-magnitude loading is positive.
 */
template <class Derived>
Matrix<typename Derived::Scalar> pca_reduce(const Eigen::MatrixBase<Derived>& x, Index d)
{
    using Scalar = typename Derived::Scalar;
    require(d >= 1 && d <= std::min(x.rows(), x.cols()), ErrorCode::DimensionTooLarge,
            "pca target dimension " + std::to_string(d) + " exceeds min(features, samples)");

    const Vector<Scalar> mean = x.rowwise().mean();
    const Matrix<Scalar> centered = x.colwise() - mean;
    if (centered.cwiseAbs().maxCoeff() == Scalar(0)) {
        return Matrix<Scalar>::Zero(d, x.cols());
    }
    auto s = svd(centered);
    Matrix<Scalar> dirs = s.U.leftCols(d);
    for (Index j = 0; j < d; ++j) {
        Index arg;
        dirs.col(j).cwiseAbs().maxCoeff(&arg);
        if (dirs(arg, j) < 0) dirs.col(j) *= Scalar(-1);
    }
    return dirs.transpose() * centered;
}

} // namespace cllsr
