#include <cllsr/aqp.hpp>
#include <cllsr/io.hpp>

#include <chrono>
#include <fstream>

namespace cllsr {

void SolverConfig::validate(Index n) const
{
    require(lambda > 0, ErrorCode::InvalidArgument, "lambda must be positive");
    require(sigma0 > 0, ErrorCode::InvalidArgument, "sigma0 must be positive");
    require(rho > 1, ErrorCode::InvalidArgument, "rho must exceed 1");
    require(eps_inner > 0 && eps_outer > 0, ErrorCode::InvalidArgument,
            "tolerances must be positive");
    require(k1 >= 1 && k1 < n, ErrorCode::InvalidArgument,
            "k1 must lie in [1, n) (k1 = " + std::to_string(k1) + ", n = " + std::to_string(n) + ")");
    require(k2 >= 1 && k2 <= n, ErrorCode::InvalidArgument,
            "k2 must lie in [1, n] (k2 = " + std::to_string(k2) + ", n = " + std::to_string(n) + ")");
    require(max_outer >= 1 && max_inner >= 1, ErrorCode::InvalidArgument,
            "iteration caps must be >= 1");
    require(threads >= 1, ErrorCode::InvalidArgument, "threads must be >= 1");
    npg.validate();
}

ViewSystem::ViewSystem(std::vector<MatrixXd> views) : xs(std::move(views))
{
    require(!xs.empty(), ErrorCode::InvalidArgument, "no views");
    if (xs.front().cols() <= kGramSampleLimit) {
        for (const auto& x : xs) grams.push_back(x.transpose() * x);
    }
}

void ConvergenceTrace::write(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::WriteFailure, path.string());
    out << "k,l,sigma,q,gap,millis\n";
    for (const auto& r : records) {
        out << r.outer << ',' << r.inner << ',' << io::format_real(r.sigma) << ','
            << io::format_real(r.objective) << ',' << io::format_real(r.gap) << ','
            << io::format_real(r.millis) << '\n';
    }
    require(static_cast<bool>(out), ErrorCode::WriteFailure, path.string());
}

ConvergenceTrace ConvergenceTrace::read(const std::filesystem::path& path)
{
    require(std::filesystem::exists(path), ErrorCode::FileMissing, path.string());
    std::ifstream in(path);
    std::string line;
    ConvergenceTrace trace;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("k,", 0) == 0) continue;
        const auto cells = io::split_cells(line);
        if (cells.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        require(cells.size() == 6, ErrorCode::ParseError, where + ": expected 6 columns");
        try {
            trace.records.push_back({std::stoi(cells[0]), std::stoi(cells[1]), std::stod(cells[2]),
                                     std::stod(cells[3]), std::stod(cells[4]), std::stod(cells[5])});
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, where + ": malformed record");
        }
    }
    return trace;
}

double penalty_objective(const AffinityState& state, const std::vector<MatrixXd>& xs, double lambda,
                         double sigma)
{
    require(state.views.size() == xs.size(), ErrorCode::ShapeMismatch,
            "penalty_objective: view count mismatch");
    double q = 0;
    for (std::size_t v = 0; v < xs.size(); ++v) {
        const auto& c = state.views[v];
        q += 0.5 * (xs[v] - xs[v] * c).squaredNorm() + lambda * c.squaredNorm() +
             0.5 * sigma * (c - state.consensus).squaredNorm();
    }
    return q;
}

double feasibility_gap(const AffinityState& state)
{
    double gap = 0;
    for (const auto& c : state.views) gap = std::max(gap, (c - state.consensus).norm());
    return gap;
}

double relative_change(const AffinityState& prev, const AffinityState& cur)
{
    require(prev.views.size() == cur.views.size(), ErrorCode::ShapeMismatch,
            "relative_change: view count mismatch");
    auto ratio = [](const MatrixXd& a, const MatrixXd& b) {
        require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::ShapeMismatch,
                "relative_change: shape mismatch");
        return (b - a).norm() / std::max(b.norm(), 1.0);
    };
    double change = ratio(prev.consensus, cur.consensus);
    for (std::size_t v = 0; v < cur.views.size(); ++v)
        change = std::max(change, ratio(prev.views[v], cur.views[v]));
    return change;
}

bool inner_stop(const AffinityState& prev, const AffinityState& cur, double eps_inner)
{
    return relative_change(prev, cur) <= eps_inner;
}

bool outer_stop(const AffinityState& state, double eps_outer)
{
    return feasibility_gap(state) <= eps_outer;
}

bool is_feasible(const AffinityState& state, Index k1, Index k2)
{
    for (const auto& c : state.views)
        if (!is_view_feasible(c, k1)) return false;
    return numerical_rank(state.consensus) <= k2;
}

AffinityState initial_state(const std::vector<MatrixXd>& xs, const SolverConfig& cfg, Index k2)
{
    std::vector<MatrixXd> knn;
    knn.reserve(xs.size());
    for (const auto& x : xs) knn.push_back(knn_affinity(x, cfg.init));
    AffinityState state;
    state.consensus = truncated_rank_projection(init_consensus(knn), k2).matrix;
    for (const auto& c : knn) state.views.push_back(project_view_feasible(c, cfg.k1));
    return state;
}

AffinityState bcd_sweep(const AffinityState& state, const ViewSystem& system, double sigma,
                        const SolverConfig& cfg, Index k2, SweepStats* stats)
{
    const auto start = std::chrono::steady_clock::now();
    AffinityState next;
    next.views.resize(system.xs.size());
    ViewUpdateStats view_stats;
    for (std::size_t v = 0; v < system.xs.size(); ++v) {
        next.views[v] = update_view_matrix(system.xs[v], system.gram(v), state.views[v],
                                           state.consensus, cfg.lambda, sigma, cfg.k1, cfg.npg,
                                           cfg.threads, &view_stats);
    }
    next.consensus = truncated_rank_projection(average_views(next.views), k2).matrix;
    if (stats) {
        stats->views = view_stats;
        stats->millis = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    }
    return next;
}

double projected_gradient_residual(const AffinityState& state, const std::vector<MatrixXd>& xs,
                                   double lambda, double sigma, Index k1)
{
    double worst = 0;
    for (std::size_t v = 0; v < xs.size(); ++v) {
        const auto& c = state.views[v];
        const MatrixXd grad = -xs[v].transpose() * (xs[v] - xs[v] * c) + 2 * lambda * c +
                              sigma * (c - state.consensus);
        worst = std::max(worst, (project_view_feasible(c - grad, k1) - c).squaredNorm());
    }
    return worst;
}

SolveResult solve(const MultiviewDataset& ds, const SolverConfig& cfg)
{
    ds.validate();
    const Index n = ds.num_samples();
    Index k2 = cfg.k2;
    if (k2 == 0) {
        require(ds.labels.has_value(), ErrorCode::InvalidArgument,
                "k2 = 0 means 20 k_c, which needs labels to know k_c; set k2 explicitly");
        k2 = default_k2(ds.num_classes());
    }
    SolverConfig resolved = cfg;
    resolved.k2 = k2;
    resolved.validate(n);

    const ViewSystem system(ds.views);
    SolveResult result;
    result.k2 = k2;
    result.state = initial_state(system.xs, cfg, k2);

    double sigma = cfg.sigma0;
    for (int k = 0; k < cfg.max_outer; ++k) {
        double q = penalty_objective(result.state, system.xs, cfg.lambda, sigma);
        result.trace.records.push_back({k, 0, sigma, q, feasibility_gap(result.state), 0.0});

        for (int l = 1; l <= cfg.max_inner; ++l) {
            SweepStats stats;
            AffinityState next = bcd_sweep(result.state, system, sigma, cfg, k2, &stats);
            const double q_next = penalty_objective(next, system.xs, cfg.lambda, sigma);
            ++result.total_sweeps;
            if (q_next > q + cfg.descent_slack * (1 + std::abs(q))) {
                ++result.descent_violations;
                require(!cfg.assert_descent, ErrorCode::NumericalFailure,
                        "penalty objective increased in sweep (" + std::to_string(k) + ", " +
                            std::to_string(l) + "): " + io::format_real(q) + " -> " +
                            io::format_real(q_next));
            }
            result.trace.records.push_back(
                {k, l, sigma, q_next, feasibility_gap(next), stats.millis});
            const bool stop = inner_stop(result.state, next, cfg.eps_inner);
            result.state = std::move(next);
            q = q_next;
            if (stop) break;
        }

        result.outer_iterations = k + 1;
        if (outer_stop(result.state, cfg.eps_outer)) {
            result.converged = true;
            break;
        }
        sigma *= cfg.rho;
    }
    return result;
}

} // namespace cllsr
