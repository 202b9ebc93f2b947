#pragma once

#include <cllsr/consensus_step.hpp>
#include <cllsr/data.hpp>
#include <cllsr/init.hpp>
#include <cllsr/sparse_step.hpp>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace cllsr {

struct SolverConfig
{
    double lambda = 100.0;
    double sigma0 = 1.0;
    double rho = 10.0;
    double eps_inner = 1e-4;
    double eps_outer = 1e-2;
    Index k1 = 20;
    /// Rank bound of the consensus matrix; 0 means 20 k_c (requires labels or set_num_clusters).
    Index k2 = 0;
    int max_outer = 12;
    int max_inner = 50;
    NpgParams npg;
    InitConfig init;
    std::uint64_t seed = 0;
    int threads = 1;
    /// Throw NumericalFailure when a sweep increases the penalty objective.
    bool assert_descent = true;
    /// Relative slack of the descent assertion.
    double descent_slack = 1e-8;

    void validate(Index n) const;
};

inline Index default_k2(int num_clusters) { return 20 * Index(num_clusters); }

/// View affinity matrices {C^v} and the rank-bounded consensus C*.
struct AffinityState
{
    std::vector<MatrixXd> views;
    MatrixXd consensus;
};

/// Data matrices with their Gram matrices cached for the column updates.
struct ViewSystem
{
    std::vector<MatrixXd> xs;
    std::vector<MatrixXd> grams;  // empty when n exceeds kGramSampleLimit

    explicit ViewSystem(std::vector<MatrixXd> views);
    Index num_samples() const { return xs.front().cols(); }
    const MatrixXd* gram(std::size_t v) const { return grams.empty() ? nullptr : &grams[v]; }
};

struct TraceRecord
{
    int outer = 0;
    int inner = 0;
    double sigma = 0;
    double objective = 0;  // penalty objective q_sigma
    double gap = 0;        // max_v ||C^v - C*||_F
    double millis = 0;     // wall time of the sweep (0 for phase-start records)
};

/*
 * Per-sweep records ordered by (outer, inner). inner == 0 is the state a
 * penalty phase starts from; inner >= 1 follows the l-th sweep.
 */
struct ConvergenceTrace
{
    std::vector<TraceRecord> records;

    /// Comma-separated with header "k,l,sigma,q,gap,millis".
    void write(const std::filesystem::path& path) const;
    static ConvergenceTrace read(const std::filesystem::path& path);
};

/// sum_v 1/2 ||X^v - X^v C^v||^2 + lambda ||C^v||^2 + sigma/2 ||C^v - C*||^2
double penalty_objective(const AffinityState& state, const std::vector<MatrixXd>& xs, double lambda,
                         double sigma);

/// max_v ||C^v - C*||_F
double feasibility_gap(const AffinityState& state);

/// Largest relative change max(||dC^v||/max(||C^v||,1), ||dC*||/max(||C*||,1)).
double relative_change(const AffinityState& prev, const AffinityState& cur);

bool inner_stop(const AffinityState& prev, const AffinityState& cur, double eps_inner);
bool outer_stop(const AffinityState& state, double eps_outer);

/// Checks the sparse/sign/diagonal constraints exactly and the consensus rank numerically.
bool is_feasible(const AffinityState& state, Index k1, Index k2);

/*
 * Starting point: kNN Gaussian affinities per view projected onto the view
 * feasible set, and the rank-k2 projection of their mean as consensus.
 */
AffinityState initial_state(const std::vector<MatrixXd>& xs, const SolverConfig& cfg, Index k2);

struct SweepStats
{
    ViewUpdateStats views;
    double millis = 0;
};

/// One block coordinate pass at fixed sigma: all view matrices, then the consensus.
AffinityState bcd_sweep(const AffinityState& state, const ViewSystem& system, double sigma,
                        const SolverConfig& cfg, Index k2, SweepStats* stats = nullptr);

/*
 * Optional diagnostic: max_v ||P(C^v - grad_v q) - C^v||_F^2, the projected
 * gradient residual that the relative-change test stands in for.
 */
double projected_gradient_residual(const AffinityState& state, const std::vector<MatrixXd>& xs,
                                   double lambda, double sigma, Index k1);

struct SolveResult
{
    AffinityState state;
    ConvergenceTrace trace;
    bool converged = false;  // false: max_outer reached before the outer test held
    int outer_iterations = 0;
    long total_sweeps = 0;
    long descent_violations = 0;
    Index k2 = 0;
};

/// Alternating quadratic penalty method on preprocessed data.
SolveResult solve(const MultiviewDataset& ds, const SolverConfig& cfg);

} // namespace cllsr
