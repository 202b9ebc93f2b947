#pragma once

#include <cllsr/aqp.hpp>
#include <cllsr/metrics.hpp>
#include <cllsr/postprocess.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cllsr {

struct ExperimentConfig
{
    SolverConfig solver;
    int repeats = 1;
    int kmeans_restarts = 20;
    NmiNormalization nmi_norm = NmiNormalization::Sqrt;
    /// Empty: nothing is written.
    std::filesystem::path output_dir;
    bool emit_heatmap = false;
    bool emit_trace = false;
    bool emit_labels = true;
    double heatmap_threshold = 1e-4;

    void validate() const;
};

struct ExperimentResult
{
    MetricReport report;
    std::vector<Scores> runs;
    Labels labels;  // labels of the first repeat
    SolveResult solve;
};

/*
 * preprocess -> solve -> fuse -> spectral clustering, with the clustering
 * repeated under seeds derived from solver.seed. The solver is deterministic,
 * so it runs once and its output is shared by all repeats.
 * The dataset must carry ground-truth labels.
 */
ExperimentResult run_experiment(const MultiviewDataset& raw, const ExperimentConfig& cfg);

/// Seed of repeat r; distinct across repeats for a fixed base seed.
std::uint64_t derive_seed(std::uint64_t base, int repeat);

/*
 * Visualization transform of an affinity matrix: entries below `threshold`
 * become 0; kept entries x map to log_x(max), which lies in (0, 1] and is
 * increasing in x. When the maximum is >= 1 the kept entries are first
 * divided by max * (1 + 1e-6).
 */
MatrixXd heatmap_transform(const MatrixXd& c, double threshold = 1e-4);

/// Binary 8-bit PGM (P5), one pixel per entry, value round(255 v).
void write_pgm(const std::filesystem::path& path, const MatrixXd& values);
MatrixXd read_pgm(const std::filesystem::path& path);

void emit_heatmap(const MatrixXd& c_star, double threshold, const std::filesystem::path& path);

struct ConvergenceSeries
{
    /// (outer, inner, sigma, q) for every trace record.
    std::vector<TraceRecord> pof;
    /// (outer, gap) at the end of each outer iteration from the second onward.
    std::vector<std::pair<int, double>> oef;
};

ConvergenceSeries convergence_series(const ConvergenceTrace& trace);

/// Writes <stem>_pof.csv and <stem>_oef.csv; returns the two paths.
std::pair<std::filesystem::path, std::filesystem::path> emit_convergence(
    const ConvergenceTrace& trace, const std::filesystem::path& dir, const std::string& stem = "trace");

ConvergenceSeries read_convergence(const std::filesystem::path& pof, const std::filesystem::path& oef);

/// One entry of a k2 grid: an absolute rank or a multiple of k_c ("20x").
struct RankSpec
{
    Index value = 0;
    bool times_clusters = false;

    Index resolve(int num_clusters) const { return times_clusters ? value * num_clusters : value; }
    std::string to_string() const;
    static RankSpec parse(const std::string& text);
};

struct SweepGrid
{
    std::vector<double> lambdas{0.1, 1, 10, 100, 1000};
    std::vector<Index> k1s{5, 10, 20, 30};
    std::vector<RankSpec> k2s{{10, true}, {20, true}, {30, true}, {40, true}};

    void validate() const;
};

struct SweepRow
{
    double lambda = 0;
    Index k1 = 0;
    Index k2 = 0;
    std::string status;  // "ok", "skipped: <reason>", "error: <message>"
    std::optional<MetricReport> report;
};

/// Runs every grid cell; inadmissible (k1 >= n or k2 > n) and failing cells are recorded, not thrown.
std::vector<SweepRow> parameter_sweep(const MultiviewDataset& raw, const ExperimentConfig& cfg,
                                      const SweepGrid& grid, int workers = 1);

void write_sweep_table(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

} // namespace cllsr
