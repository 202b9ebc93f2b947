#include "oracles.hpp"

#include <cllsr/metrics.hpp>
#include <cllsr/postprocess.hpp>

#include <doctest.h>

using namespace cllsr;

namespace {

MatrixXd block_affinity(const std::vector<Index>& sizes, std::mt19937_64& rng, Labels* labels)
{
    Index n = 0;
    for (Index s : sizes) n += s;
    MatrixXd a = MatrixXd::Zero(n, n);
    std::uniform_real_distribution<double> w(0.5, 1.0);
    Index off = 0;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
        for (Index i = 0; i < sizes[b]; ++i) {
            labels->push_back(int(b));
            for (Index j = 0; j < i; ++j) a(off + i, off + j) = a(off + j, off + i) = w(rng);
        }
        off += sizes[b];
    }
    return a;
}

} // namespace

TEST_CASE("fuse")
{
    std::mt19937_64 rng(1);
    const MatrixXd r = oracle::gaussian(9, 9, rng);
    const MatrixXd f = fuse(r);
    CHECK((f.array() == f.transpose().array()).all());
    CHECK((f.array() >= 0).all());
    for (Index i = 0; i < 9; ++i)
        for (Index j = 0; j < 9; ++j)
            CHECK(std::abs(f(i, j) - 0.5 * (std::max(r(i, j), 0.0) + std::max(r(j, i), 0.0))) <= 1e-12);

    const MatrixXd sym = (r.cwiseAbs() + r.cwiseAbs().transpose()) / 2;
    CHECK((fuse(sym) - sym).cwiseAbs().maxCoeff() <= 1e-15);

    MatrixXd neg = MatrixXd::Zero(3, 3);
    neg(0, 2) = -5;
    CHECK(fuse(neg).isZero(0));
}

TEST_CASE("spectral_clustering")
{
    std::mt19937_64 rng(2);

    SUBCASE("disconnected blocks are recovered exactly")
    {
        Labels truth;
        const MatrixXd a = block_affinity({12, 7, 20, 9}, rng, &truth);
        const Labels pred = spectral_clustering(a, 4, 11);
        CHECK(ari(pred, truth) == 1.0);
    }

    SUBCASE("permutation equivariance")
    {
        Labels truth;
        MatrixXd a = block_affinity({10, 10, 10}, rng, &truth);
        // light cross-block noise so the problem is not trivially disconnected
        for (Index i = 0; i < 30; ++i)
            for (Index j = 0; j < i; ++j)
                if (a(i, j) == 0) a(i, j) = a(j, i) = 0.01 * std::uniform_real_distribution<double>(0, 1)(rng);
        std::vector<Index> perm(30);
        std::iota(perm.begin(), perm.end(), Index(0));
        std::shuffle(perm.begin(), perm.end(), rng);
        MatrixXd p(30, 30);
        for (Index i = 0; i < 30; ++i)
            for (Index j = 0; j < 30; ++j) p(i, j) = a(perm[i], perm[j]);
        const Labels base = spectral_clustering(a, 3, 5);
        const Labels permuted = spectral_clustering(p, 3, 5);
        Labels mapped(30);
        for (Index i = 0; i < 30; ++i) mapped[perm[i]] = permuted[i];
        CHECK(ari(mapped, base) == 1.0);
        CHECK(ari(base, truth) == 1.0);
    }

    SUBCASE("a single clique splits into two and the objective can be rechecked")
    {
        const MatrixXd ones = MatrixXd::Ones(12, 12) - MatrixXd::Identity(12, 12);
        const MatrixXd emb = spectral_embedding(ones, 2);
        const Labels pred = spectral_clustering(ones, 2, 3);
        CHECK(pred.size() == 12);
        const auto km = kmeans(emb, 2, 20, 3);
        CHECK(std::abs(km.objective - kmeans_objective(emb, km.labels, 2)) <= 1e-10 * (1 + km.objective));
    }

    SUBCASE("isolated samples are tolerated")
    {
        Labels truth;
        MatrixXd a = block_affinity({8, 8, 1}, rng, &truth);
        CHECK(spectral_clustering(a, 3, 1).size() == 17);
    }

    SUBCASE("deterministic for a fixed seed")
    {
        Labels truth;
        const MatrixXd a = block_affinity({6, 6, 6}, rng, &truth);
        CHECK(spectral_clustering(a, 3, 9) == spectral_clustering(a, 3, 9));
    }

    CHECK_THROWS_AS(spectral_clustering(MatrixXd::Ones(4, 4), 1, 0), Error);
}

TEST_CASE("kmeans")
{
    std::mt19937_64 rng(3);

    SUBCASE("well separated clouds")
    {
        MatrixXd pts(60, 2);
        Labels truth;
        std::normal_distribution<double> nd(0, 0.1);
        for (Index i = 0; i < 60; ++i) {
            const int c = int(i % 3);
            truth.push_back(c);
            pts(i, 0) = 10.0 * c + nd(rng);
            pts(i, 1) = -7.0 * c + nd(rng);
        }
        const auto res = kmeans(pts, 3, 5, 1);
        CHECK(ari(res.labels, truth) == 1.0);
    }

    SUBCASE("k = n gives zero objective")
    {
        const MatrixXd pts = oracle::gaussian(7, 3, rng);
        const auto res = kmeans(pts, 7, 3, 2);
        CHECK(res.objective <= 1e-24);
    }

    SUBCASE("beats random assignments and Lloyd never goes uphill")
    {
        const MatrixXd pts = oracle::gaussian(80, 4, rng);
        const auto res = kmeans(pts, 5, 10, 4);
        CHECK(std::abs(res.objective - kmeans_objective(pts, res.labels, 5)) <= 1e-10 * res.objective);
        for (int t = 0; t < 100; ++t)
            CHECK(res.objective <= kmeans_objective(pts, oracle::random_labels(80, 5, rng), 5));
        for (std::size_t i = 1; i < res.history.size(); ++i)
            CHECK(res.history[i] <= res.history[i - 1] + 1e-12 * res.history[i - 1]);
    }

    CHECK_THROWS_AS(kmeans(MatrixXd::Zero(3, 2), 4, 1, 0), Error);
}
