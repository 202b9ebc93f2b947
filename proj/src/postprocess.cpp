#include <cllsr/postprocess.hpp>

#include <limits>
#include <random>

namespace cllsr {

MatrixXd fuse(const MatrixXd& c_star)
{
    require(c_star.rows() == c_star.cols(), ErrorCode::ShapeMismatch, "fuse needs a square matrix");
    const MatrixXd pos = c_star.cwiseMax(0.0);
    return 0.5 * (pos + pos.transpose());
}

double kmeans_objective(const MatrixXd& points, const Labels& labels, int k)
{
    require(static_cast<Index>(labels.size()) == points.rows(), ErrorCode::LengthMismatch,
            "kmeans_objective: label count differs from point count");
    MatrixXd sums = MatrixXd::Zero(k, points.cols());
    VectorXd counts = VectorXd::Zero(k);
    for (Index i = 0; i < points.rows(); ++i) {
        sums.row(labels[i]) += points.row(i);
        counts(labels[i]) += 1;
    }
    double obj = 0;
    for (Index i = 0; i < points.rows(); ++i)
        obj += (points.row(i) - sums.row(labels[i]) / counts(labels[i])).squaredNorm();
    return obj;
}

namespace {

struct Run
{
    Labels labels;
    MatrixXd centers;
    double objective;
    std::vector<double> history;
};

MatrixXd seed_centers(const MatrixXd& points, int k, std::mt19937_64& rng)
{
    const Index n = points.rows();
    MatrixXd centers(k, points.cols());
    std::uniform_int_distribution<Index> pick(0, n - 1);
    centers.row(0) = points.row(pick(rng));
    VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Index chosen = 0;
        if (total > 0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            chosen = n - 1;
            for (Index i = 0; i < n; ++i) {
                target -= d2(i);
                if (target < 0 && d2(i) > 0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        centers.row(c) = points.row(chosen);
        d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

Run lloyd(const MatrixXd& points, int k, std::mt19937_64& rng)
{
    const Index n = points.rows();
    constexpr int kMaxIters = 300;
    constexpr int kReseedAttempts = 10;

    Run run{Labels(static_cast<std::size_t>(n), -1), seed_centers(points, k, rng), 0, {}};
    for (int it = 0; it < kMaxIters; ++it) {
        bool changed = false;
        VectorXd dist(n);
        for (Index i = 0; i < n; ++i) {
            Index best;
            dist(i) = (run.centers.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&best);
            if (run.labels[i] != static_cast<int>(best)) {
                run.labels[i] = static_cast<int>(best);
                changed = true;
            }
        }

        // Empty clusters take the point farthest from its center.
        for (int attempt = 0;; ++attempt) {
            std::vector<Index> counts(static_cast<std::size_t>(k), 0);
            for (int l : run.labels) ++counts[l];
            const auto empty = std::find(counts.begin(), counts.end(), Index(0));
            if (empty == counts.end()) break;
            require(attempt < kReseedAttempts * k, ErrorCode::EmptyClusterUnrecoverable,
                    "kmeans could not fill an empty cluster");
            Index far = 0;
            double far_d = -1;
            for (Index i = 0; i < n; ++i)
                if (counts[run.labels[i]] > 1 && dist(i) > far_d) {
                    far_d = dist(i);
                    far = i;
                }
            require(far_d >= 0, ErrorCode::EmptyClusterUnrecoverable,
                    "kmeans: fewer movable points than clusters");
            run.labels[far] = static_cast<int>(empty - counts.begin());
            dist(far) = 0;
            changed = true;
        }

        MatrixXd sums = MatrixXd::Zero(k, points.cols());
        VectorXd counts = VectorXd::Zero(k);
        for (Index i = 0; i < n; ++i) {
            sums.row(run.labels[i]) += points.row(i);
            counts(run.labels[i]) += 1;
        }
        for (int c = 0; c < k; ++c) run.centers.row(c) = sums.row(c) / counts(c);
        run.history.push_back(kmeans_objective(points, run.labels, k));
        if (!changed) break;
    }
    run.objective = run.history.back();
    return run;
}

} // namespace

KMeansResult kmeans(const MatrixXd& points, int k, int restarts, std::uint64_t seed)
{
    require(k >= 1 && k <= points.rows(), ErrorCode::InvalidArgument, "kmeans: k must lie in [1, n]");
    require(restarts >= 1, ErrorCode::InvalidArgument, "kmeans: restarts must be >= 1");
    require(points.allFinite(), ErrorCode::NumericalFailure, "kmeans: non-finite points");

    KMeansResult best;
    best.objective = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    for (int r = 0; r < restarts; ++r) {
        Run run = lloyd(points, k, rng);
        if (run.objective < best.objective) {
            best.labels = std::move(run.labels);
            best.centers = std::move(run.centers);
            best.objective = run.objective;
            best.best_restart = r;
            best.history = std::move(run.history);
        }
    }
    return best;
}

MatrixXd spectral_embedding(const MatrixXd& affinity, int k, double degree_guard)
{
    const Index n = affinity.rows();
    require(affinity.cols() == n, ErrorCode::ShapeMismatch, "affinity must be square");
    require((affinity.array() >= 0).all(), ErrorCode::InvalidArgument,
            "affinity must be nonnegative");
    const VectorXd inv_sqrt_deg =
        (affinity.rowwise().sum().array() + degree_guard).rsqrt().matrix();
    require(inv_sqrt_deg.allFinite(), ErrorCode::DegenerateGraph, "non-finite degree");

    MatrixXd laplacian = -(inv_sqrt_deg.asDiagonal() * affinity * inv_sqrt_deg.asDiagonal());
    laplacian.diagonal().array() += 1.0;
    laplacian = 0.5 * (laplacian + laplacian.transpose());

    MatrixXd embedding = symmetric_eigs(laplacian, k).vectors;
    for (Index i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0) embedding.row(i) /= norm;
    }
    return embedding;
}

Labels spectral_clustering(const MatrixXd& affinity, int k, std::uint64_t seed,
                           const SpectralOptions& opts)
{
    require(k >= 2, ErrorCode::InvalidArgument, "spectral clustering needs k_c >= 2");
    require(k <= affinity.rows(), ErrorCode::InvalidArgument, "more clusters than samples");
    return kmeans(spectral_embedding(affinity, k, opts.degree_guard), k, opts.restarts, seed).labels;
}

} // namespace cllsr
