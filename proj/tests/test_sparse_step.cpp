#include "oracles.hpp"

#include <cllsr/sparse_step.hpp>

#include <doctest.h>

using namespace cllsr;

namespace {

ColumnProblem random_problem(std::mt19937_64& rng, Index m, Index len, double lambda, double sigma)
{
    ColumnProblem p;
    p.A = oracle::gaussian(m, len, rng);
    p.b = oracle::gaussian(m, 1, rng).col(0);
    p.c = oracle::gaussian(len, 1, rng).col(0).cwiseAbs();
    p.lambda = lambda;
    p.sigma = sigma;
    return p;
}

oracle::QuadraticOptimum exhaustive_optimum(const ColumnProblem& p, int k1)
{
    const Index len = p.size();
    const MatrixXd H = p.A.transpose() * p.A + (2 * p.lambda + p.sigma) * MatrixXd::Identity(len, len);
    const VectorXd g = p.A.transpose() * p.b + p.sigma * p.c;
    const double c0 = 0.5 * p.b.squaredNorm() + 0.5 * p.sigma * p.c.squaredNorm();
    return oracle::sparse_nonneg_quadratic_min(H, g, c0, k1);
}

} // namespace

TEST_CASE("column_value_grad hand values")
{
    ColumnProblem p;
    p.A = MatrixXd::Zero(2, 3);
    p.b = VectorXd::Zero(2);
    p.c = VectorXd::Zero(3);
    p.lambda = 1;
    p.sigma = 1;

    auto at_zero = column_value_grad(p, VectorXd::Zero(3));
    CHECK(at_zero.value == 0.0);
    CHECK(at_zero.grad.cwiseAbs().maxCoeff() == 0.0);

    const auto at_e1 = column_value_grad(p, VectorXd::Unit(3, 0));
    CHECK(at_e1.value == doctest::Approx(1.5));
    CHECK((at_e1.grad - 3 * VectorXd::Unit(3, 0)).norm() == doctest::Approx(0.0));

    CHECK_THROWS_AS(column_value_grad(p, VectorXd::Zero(4)), Error);
    p.sigma = 0;
    CHECK_THROWS_AS(column_value_grad(p, VectorXd::Zero(3)), Error);
}

TEST_CASE("column_value_grad matches central finite differences")
{
    std::mt19937_64 rng(21);
    for (int inst = 0; inst < 20; ++inst) {
        const ColumnProblem p = random_problem(rng, 6, 9, 0.5, 2.0);
        for (int pt = 0; pt < 20; ++pt) {
            const VectorXd x = oracle::gaussian(9, 1, rng).col(0);
            const VectorXd fd = oracle::finite_difference_gradient(
                [&](const VectorXd& z) { return p.value(z); }, x);
            const VectorXd g = column_value_grad(p, x).grad;
            CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
        }
    }
}

TEST_CASE("project_nonneg_ksparse")
{
    VectorXd z(4);
    z << 3, -1, 2, 5;
    VectorXd expect(4);
    expect << 3, 0, 0, 5;
    CHECK(project_nonneg_ksparse(z, 2) == expect);

    const VectorXd neg = -VectorXd::LinSpaced(6, 1, 6);
    for (Index k = 1; k <= 6; ++k) CHECK(project_nonneg_ksparse(neg, k).isZero(0));

    SUBCASE("ties go to the lower index")
    {
        VectorXd t(5);
        t << 1, 2, 2, 0, 2;
        VectorXd e(5);
        e << 0, 2, 2, 0, 0;
        CHECK(project_nonneg_ksparse(t, 2) == e);
    }

    SUBCASE("matches enumeration of all supports")
    {
        std::mt19937_64 rng(8);
        std::uniform_int_distribution<int> len(1, 12);
        for (int trial = 0; trial < 300; ++trial) {
            const int n = len(rng);
            const int k = std::uniform_int_distribution<int>(1, std::min(4, n))(rng);
            const VectorXd v = oracle::gaussian(n, 1, rng).col(0);
            const VectorXd y = project_nonneg_ksparse(v, k);
            CHECK(y == oracle::project_by_enumeration(v, k));
            CHECK(in_sparse_nonneg_set(y, k));
        }
    }

    SUBCASE("works on single precision too")
    {
        Eigen::VectorXf f(3);
        f << 1.f, -2.f, 0.5f;
        CHECK(project_nonneg_ksparse(f, 1)(0) == 1.f);
    }
    CHECK_THROWS_AS(project_nonneg_ksparse(z, 0), Error);
    CHECK_THROWS_AS(project_nonneg_ksparse(z, 5), Error);
}

TEST_CASE("bb_initial_step")
{
    std::mt19937_64 rng(1);
    const VectorXd s = oracle::gaussian(5, 1, rng).col(0);
    CHECK(bb_initial_step(s, 7.5 * s, 1e-10, 1e10) == doctest::Approx(7.5));
    CHECK(bb_initial_step(s, 1e15 * s, 1e-10, 1e10) == 1e10);
    CHECK(bb_initial_step(VectorXd::Zero(5), s, 1e-10, 1e10) == 1e-10);
    CHECK(bb_initial_step(s, -s, 1e-10, 1e10) == 1e-10);
    VectorXd bad = s;
    bad(0) = std::numeric_limits<double>::infinity();
    CHECK(bb_initial_step(s, bad, 1e-10, 1e10) == 1e-10);
}

TEST_CASE("npg_solve")
{
    NpgParams params;
    params.record_steps = true;

    SUBCASE("a feasible unconstrained minimizer is a fixed point")
    {
        ColumnProblem p;
        p.A = MatrixXd::Zero(3, 6);
        p.b = VectorXd::Zero(3);
        p.c = VectorXd::Zero(6);
        p.c(1) = 2.0;
        p.c(4) = 1.0;
        p.lambda = 0.5;
        p.sigma = 1.0;
        const VectorXd x_star = p.sigma * p.c / (2 * p.lambda + p.sigma);
        const auto res = npg_solve(p, x_star, 2, params);
        CHECK(res.iterations == 1);
        CHECK(res.converged);
        CHECK(res.y == x_star);
    }

    SUBCASE("separable case: sigma c / (2 lambda + sigma) on the support of c")
    {
        ColumnProblem p;
        p.A = MatrixXd::Zero(4, 10);
        p.b = VectorXd::Zero(4);
        p.c = VectorXd::Zero(10);
        p.c(2) = 0.7;
        p.c(5) = 1.3;
        p.c(9) = 0.2;
        p.lambda = 2.0;
        p.sigma = 3.0;
        const auto res = npg_solve(p, VectorXd::Zero(10), 3, params);
        const VectorXd expect = p.sigma * p.c / (2 * p.lambda + p.sigma);
        CHECK((res.y - expect).cwiseAbs().maxCoeff() <= 1e-6);
    }

    SUBCASE("agrees with the exhaustive support optimum and keeps the descent test")
    {
        // default ridge and first penalty value; the step tolerance is tightened because a
        // small step can precede the last support swap
        NpgParams tight = params;
        tight.tol = 1e-12;
        tight.max_iters = 2000;
        std::mt19937_64 rng(99);
        for (int inst = 0; inst < 20; ++inst) {
            const ColumnProblem p = random_problem(rng, 10, 8, 100.0, 1.0);
            const auto res = npg_solve(p, VectorXd::Zero(8), 3, tight);
            const auto best = exhaustive_optimum(p, 3);
            CHECK(res.value <= best.value + 1e-6);
            CHECK(std::abs(res.value - p.value(res.y)) <= 1e-12 * (1 + std::abs(res.value)));
            for (const auto& step : res.steps) {
                CHECK(in_sparse_nonneg_set(step.iterate, 3));
                CHECK(p.value(step.iterate) <= step.reference - 0.5 * params.c_desc * step.step_sq);
            }
        }
    }

    SUBCASE("rejects an infeasible start")
    {
        ColumnProblem p;
        p.A = MatrixXd::Identity(3, 3);
        p.b = VectorXd::Ones(3);
        p.c = VectorXd::Zero(3);
        CHECK_THROWS_AS(npg_solve(p, -VectorXd::Ones(3), 2, params), Error);
        CHECK_THROWS_AS(npg_solve(p, VectorXd::Ones(3), 2, params), Error);
    }

    SUBCASE("a wrong gradient exhausts backtracking")
    {
        struct Broken
        {
            Index size() const { return 3; }
            double value(const VectorXd& x) const { return x.squaredNorm(); }
            void gradient(const VectorXd& x, VectorXd& g) const { g = -x - VectorXd::Ones(3); }
            double initial_step() const { return 1.0; }
        };
        try {
            npg_minimize(Broken{}, VectorXd::Zero(3), 2, NpgParams{});
            FAIL("expected BacktrackExhausted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BacktrackExhausted);
        }
    }
}

TEST_CASE("view column objective agrees with the explicit column problem")
{
    std::mt19937_64 rng(31);
    const MatrixXd x = oracle::gaussian(7, 12, rng);
    const MatrixXd gram = x.transpose() * x;
    const VectorXd cstar = oracle::gaussian(12, 1, rng).col(0).cwiseAbs();
    for (Index i : {Index(0), Index(5), Index(11)}) {
        ColumnProblem p;
        p.A.resize(7, 11);
        for (Index j = 0, k = 0; j < 12; ++j)
            if (j != i) p.A.col(k++) = x.col(j);
        p.b = x.col(i);
        p.c = drop_entry(cstar, i);
        p.lambda = 0.3;
        p.sigma = 4.0;
        const ViewColumnObjective with_gram(x, &gram, i, p.c, p.lambda, p.sigma);
        const ViewColumnObjective plain(x, nullptr, i, p.c, p.lambda, p.sigma);
        const VectorXd y = project_nonneg_ksparse(oracle::gaussian(11, 1, rng).col(0), 4);
        VectorXd g1, g2, g3;
        p.gradient(y, g1);
        with_gram.gradient(y, g2);
        plain.gradient(y, g3);
        CHECK(std::abs(with_gram.value(y) - p.value(y)) <= 1e-12 * (1 + p.value(y)));
        CHECK((g1 - g2).norm() <= 1e-10 * (1 + g1.norm()));
        CHECK((g1 - g3).norm() <= 1e-10 * (1 + g1.norm()));
    }
}

TEST_CASE("update_view_matrix")
{
    std::mt19937_64 rng(12);
    const Index n = 30, k1 = 4;
    const MatrixXd x = oracle::gaussian(6, n, rng);
    const MatrixXd cstar = oracle::gaussian(n, n, rng).cwiseAbs() * 0.1;
    const MatrixXd prev = project_view_feasible(oracle::gaussian(n, n, rng).cwiseAbs(), k1);
    const NpgParams params;

    auto view_objective = [&](const MatrixXd& c, double lambda, double sigma) {
        return 0.5 * (x - x * c).squaredNorm() + lambda * c.squaredNorm() +
               0.5 * sigma * (c - cstar).squaredNorm();
    };

    SUBCASE("output is feasible and does not increase the view objective")
    {
        const MatrixXd next = update_view_matrix(x, prev, cstar, 0.5, 2.0, k1, params);
        CHECK(is_view_feasible(next, k1));
        CHECK(view_objective(next, 0.5, 2.0) <= view_objective(prev, 0.5, 2.0) + 1e-10);
    }

    SUBCASE("deterministic for identical input")
    {
        const MatrixXd a = update_view_matrix(x, prev, cstar, 0.5, 2.0, k1, params, 1);
        const MatrixXd b = update_view_matrix(x, prev, cstar, 0.5, 2.0, k1, params, 3);
        CHECK((a.array() == b.array()).all());
    }

    SUBCASE("a huge penalty pulls the columns onto the projection of the consensus")
    {
        const MatrixXd next = update_view_matrix(x, prev, cstar, 0.5, 1e8, k1, params);
        const MatrixXd target = project_view_feasible(cstar, k1);
        CHECK((next - target).norm() <= 1e-2 * target.norm());
    }

    SUBCASE("Gram and plain products give the same update")
    {
        const MatrixXd gram = x.transpose() * x;
        const MatrixXd a = update_view_matrix(x, &gram, prev, cstar, 0.5, 2.0, k1, params);
        const MatrixXd b = update_view_matrix(x, nullptr, prev, cstar, 0.5, 2.0, k1, params);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-8);
    }

    SUBCASE("planted sparse self-representation is recovered to the noise floor")
    {
        // six unit directions 60 degrees apart per plane: each equals the sum of its two neighbours
        const Index groups = 5, per = 6, m = 60;
        MatrixXd xs(m, groups * per);
        for (Index g = 0; g < groups; ++g) {
            const MatrixXd basis = oracle::gaussian(m, 2, rng).householderQr().householderQ() *
                                   MatrixXd::Identity(m, 2);
            for (Index j = 0; j < per; ++j) {
                const double t = 2 * M_PI * double(j) / double(per);
                xs.col(g * per + j) = basis.col(0) * std::cos(t) + basis.col(1) * std::sin(t);
            }
        }
        const Index nn = xs.cols();
        MatrixXd c = MatrixXd::Zero(nn, nn);
        for (int sweep = 0; sweep < 3; ++sweep)
            c = update_view_matrix(xs, c, c, 1e-6, 1e-6, 2, params);
        CHECK(is_view_feasible(c, 2));
        CHECK((xs - xs * c).norm() <= 1e-2 * xs.norm());
    }
}

TEST_CASE("project_view_feasible")
{
    std::mt19937_64 rng(2);
    const MatrixXd c = oracle::gaussian(8, 8, rng);
    const MatrixXd p = project_view_feasible(c, 3);
    CHECK(is_view_feasible(p, 3));
    CHECK((project_view_feasible(p, 3).array() == p.array()).all());
    CHECK_FALSE(is_view_feasible(c, 3));
    CHECK_THROWS_AS(project_view_feasible(c, 8), Error);
}
