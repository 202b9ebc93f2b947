#include "oracles.hpp"

#include <cllsr/aqp.hpp>

#include <doctest.h>

using namespace cllsr;

namespace {

AffinityState random_state(Index n, int views, Index k1, std::mt19937_64& rng)
{
    AffinityState s;
    for (int v = 0; v < views; ++v)
        s.views.push_back(project_view_feasible(oracle::gaussian(n, n, rng).cwiseAbs(), k1));
    s.consensus = oracle::gaussian(n, n, rng);
    return s;
}

MultiviewDataset small_synthetic()
{
    SynthOptions o;
    o.num_clusters = 3;
    o.per_cluster = 15;
    o.num_views = 2;
    o.seed = 3;
    return preprocess(synthesize_dataset(o));
}

} // namespace

TEST_CASE("penalty_objective")
{
    std::mt19937_64 rng(1);
    const std::vector<MatrixXd> xs{oracle::gaussian(4, 6, rng), oracle::gaussian(3, 6, rng)};

    AffinityState zero;
    zero.views.assign(2, MatrixXd::Zero(6, 6));
    zero.consensus = MatrixXd::Zero(6, 6);
    const double half_energy = 0.5 * (xs[0].squaredNorm() + xs[1].squaredNorm());
    CHECK(penalty_objective(zero, xs, 3.0, 7.0) == doctest::Approx(half_energy).epsilon(1e-14));

    AffinityState s = random_state(6, 2, 3, rng);
    AffinityState agreed = s;
    agreed.consensus = s.views[0];
    agreed.views[1] = s.views[0];
    CHECK(penalty_objective(agreed, xs, 0.5, 1.0) == penalty_objective(agreed, xs, 0.5, 1e6));

    for (int trial = 0; trial < 20; ++trial) {
        const AffinityState r = random_state(6, 2, 3, rng);
        double fit = 0, ridge = 0, pen = 0;
        for (int v = 0; v < 2; ++v) {
            for (Index j = 0; j < 6; ++j) {
                fit += 0.5 * (xs[v].col(j) - xs[v] * r.views[v].col(j)).squaredNorm();
                for (Index i = 0; i < 6; ++i) {
                    ridge += r.views[v](i, j) * r.views[v](i, j);
                    const double d = r.views[v](i, j) - r.consensus(i, j);
                    pen += d * d;
                }
            }
        }
        const double expect = fit + 0.25 * ridge + 0.5 * 3.0 * pen;
        CHECK(std::abs(penalty_objective(r, xs, 0.25, 3.0) - expect) <= 1e-10 * expect);
    }
}

TEST_CASE("inner_stop and outer_stop")
{
    std::mt19937_64 rng(2);
    const AffinityState s = random_state(8, 3, 2, rng);
    CHECK(inner_stop(s, s, 1e-12));

    SUBCASE("denominator clamps at 1")
    {
        AffinityState small;
        small.views.assign(1, MatrixXd::Zero(4, 4));
        small.consensus = MatrixXd::Zero(4, 4);
        AffinityState moved = small;
        moved.views[0](1, 2) = 10 * 1e-4;
        CHECK_FALSE(inner_stop(small, moved, 1e-4));
        CHECK(inner_stop(small, moved, 1e-2));
    }

    SUBCASE("matches recomputation on random pairs")
    {
        for (int trial = 0; trial < 50; ++trial) {
            const AffinityState a = random_state(8, 3, 2, rng);
            AffinityState b = a;
            const double scale = std::pow(10.0, -double(trial % 6));
            for (auto& c : b.views) c += oracle::gaussian(8, 8, rng, scale);
            b.consensus += oracle::gaussian(8, 8, rng, scale);
            double worst = 0;
            for (int v = 0; v < 3; ++v)
                worst = std::max(worst, (b.views[v] - a.views[v]).norm() / std::max(b.views[v].norm(), 1.0));
            worst = std::max(worst, (b.consensus - a.consensus).norm() / std::max(b.consensus.norm(), 1.0));
            CHECK(relative_change(a, b) == doctest::Approx(worst).epsilon(1e-12));
            CHECK(inner_stop(a, b, 1e-3) == (worst <= 1e-3));
        }
    }

    AffinityState same = s;
    for (auto& c : same.views) c = same.consensus;
    CHECK(outer_stop(same, 1e-12));

    AffinityState offset = same;
    MatrixXd d = oracle::gaussian(8, 8, rng);
    d *= 2e-2 / d.norm();
    offset.views[1] += d;
    CHECK_FALSE(outer_stop(offset, 1e-2));
    CHECK(feasibility_gap(offset) == doctest::Approx(2e-2).epsilon(1e-12));

    for (int trial = 0; trial < 20; ++trial) {
        const AffinityState r = random_state(8, 3, 2, rng);
        double gap = 0;
        for (const auto& c : r.views) gap = std::max(gap, (c - r.consensus).norm());
        CHECK(std::abs(feasibility_gap(r) - gap) <= 1e-12);
    }
}

TEST_CASE("bcd_sweep")
{
    const auto ds = small_synthetic();
    const ViewSystem system(ds.views);
    SolverConfig cfg;
    cfg.k1 = 5;
    const Index k2 = 10;
    AffinityState state = initial_state(system.xs, cfg, k2);
    CHECK(is_feasible(state, cfg.k1, k2));

    SUBCASE("ten sweeps at fixed sigma never increase the penalty objective")
    {
        double q = penalty_objective(state, system.xs, cfg.lambda, 10.0);
        for (int l = 0; l < 10; ++l) {
            state = bcd_sweep(state, system, 10.0, cfg, k2);
            const double next = penalty_objective(state, system.xs, cfg.lambda, 10.0);
            CHECK(next <= q + 1e-8 * (1 + std::abs(q)));
            CHECK(is_feasible(state, cfg.k1, k2));
            q = next;
        }
    }

    SUBCASE("a converged state is a fixed point")
    {
        for (int l = 0; l < 200; ++l) {
            AffinityState next = bcd_sweep(state, system, 1.0, cfg, k2);
            const bool done = relative_change(state, next) <= 1e-12;
            state = std::move(next);
            if (done) break;
        }
        const double q = penalty_objective(state, system.xs, cfg.lambda, 1.0);
        const AffinityState again = bcd_sweep(state, system, 1.0, cfg, k2);
        CHECK(std::abs(penalty_objective(again, system.xs, cfg.lambda, 1.0) - q) <= 1e-8 * (1 + q));
    }
}

TEST_CASE("solve on a seeded synthetic dataset")
{
    const auto ds = preprocess(synthesize_dataset(3, 50, 3, 0.01, 7));
    SolverConfig cfg;
    const auto res = solve(ds, cfg);

    CHECK(res.converged);
    CHECK(res.outer_iterations <= 15);
    CHECK(res.descent_violations == 0);
    CHECK(res.k2 == 60);
    CHECK(is_feasible(res.state, cfg.k1, res.k2));

    const auto& recs = res.trace.records;
    REQUIRE(!recs.empty());
    double expected_sigma = 1.0;
    int outer = 0;
    double init_norm = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (i > 0) {
            const bool ordered = recs[i].outer > recs[i - 1].outer ||
                                 (recs[i].outer == recs[i - 1].outer && recs[i].inner > recs[i - 1].inner);
            CHECK(ordered);
        }
        if (recs[i].outer != outer) {
            outer = recs[i].outer;
            expected_sigma *= 10.0;
        }
        CHECK(recs[i].sigma == doctest::Approx(expected_sigma));
        if (i > 0 && recs[i].outer == recs[i - 1].outer)
            CHECK(recs[i].objective <= recs[i - 1].objective + 1e-8 * (1 + std::abs(recs[i - 1].objective)));
        CHECK(std::isfinite(recs[i].objective));
    }

    const AffinityState init = initial_state(ds.views, cfg, res.k2);
    for (const auto& c : init.views) init_norm = std::max(init_norm, c.norm());
    init_norm = std::max(init_norm, init.consensus.norm());
    for (const auto& c : res.state.views) CHECK(c.norm() <= 10 * init_norm);
    CHECK(res.state.consensus.norm() <= 10 * init_norm);

    MatrixXd mean = MatrixXd::Zero(150, 150);
    for (const auto& c : res.state.views) mean += c / 3.0;
    CHECK((res.state.consensus - mean).norm() <= cfg.eps_outer);
}

TEST_CASE("solve input validation")
{
    auto ds = small_synthetic();
    SolverConfig cfg;
    cfg.k1 = 45;
    CHECK_THROWS_AS(solve(ds, cfg), Error);
    cfg.k1 = 5;
    cfg.rho = 1.0;
    CHECK_THROWS_AS(solve(ds, cfg), Error);
    cfg.rho = 10;
    ds.labels.reset();
    CHECK_THROWS_AS(solve(ds, cfg), Error);
    cfg.k2 = 10;
    cfg.max_outer = 1;
    CHECK_NOTHROW(solve(ds, cfg));
}

TEST_CASE("ConvergenceTrace round-trips through its text form")
{
    ConvergenceTrace t;
    t.records = {{0, 0, 1.0, 12.5, 0.4, 0.0}, {0, 1, 1.0, 11.25, 0.3, 3.5}, {1, 0, 10.0, 0.1, 1e-9, 0.0}};
    const auto path = std::filesystem::temp_directory_path() / "cllsr_trace_roundtrip.csv";
    t.write(path);
    const auto back = ConvergenceTrace::read(path);
    REQUIRE(back.records.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.records[i].outer == t.records[i].outer);
        CHECK(back.records[i].inner == t.records[i].inner);
        CHECK(back.records[i].objective == t.records[i].objective);
        CHECK(back.records[i].gap == t.records[i].gap);
    }
}
