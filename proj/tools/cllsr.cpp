// Command-line front end: run, sweep, eval, heatmap, trace-export, synth.

#include <cllsr/experiment.hpp>
#include <cllsr/io.hpp>
#include <cllsr/parallel.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

using namespace cllsr;

struct SolverFlags
{
    double lambda = 100;
    double sigma0 = 1;
    double rho = 10;
    double eps_inner = 1e-4;
    double eps_outer = 1e-2;
    Index k1 = 20;
    std::string k2 = "20x";
    int max_outer = 12;
    int max_inner = 50;
    int kappa = 5;
    double bandwidth = 0;
    std::uint64_t seed = 0;
    int threads = default_thread_count();

    SolverConfig to_config(int num_clusters) const
    {
        SolverConfig cfg;
        cfg.lambda = lambda;
        cfg.sigma0 = sigma0;
        cfg.rho = rho;
        cfg.eps_inner = eps_inner;
        cfg.eps_outer = eps_outer;
        cfg.k1 = k1;
        cfg.k2 = RankSpec::parse(k2).resolve(num_clusters);
        cfg.max_outer = max_outer;
        cfg.max_inner = max_inner;
        cfg.init.kappa = kappa;
        if (bandwidth > 0) cfg.init.bandwidth = bandwidth;
        cfg.seed = seed;
        cfg.threads = threads;
        return cfg;
    }
};

template <class T>
std::vector<T> parse_list(const std::string& text, T (*parse)(const std::string&))
{
    std::vector<T> out;
    for (const auto& cell : io::split_cells(text)) out.push_back(parse(cell));
    return out;
}

double parse_double(const std::string& s)
{
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "not a number: '" + s + "'");
    }
}

Index parse_index(const std::string& s)
{
    try {
        return std::stol(s);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "not an integer: '" + s + "'");
    }
}

MultiviewDataset load(const std::string& manifest)
{
    return load_dataset(DatasetManifest::read(manifest));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cardinality-constrained low-rank multiview subspace clustering"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Key-value config file; keys are the long flag names");

    SolverFlags flags;
    app.add_option("--lambda", flags.lambda, "Ridge weight")->capture_default_str();
    app.add_option("--sigma0", flags.sigma0, "Initial penalty factor")->capture_default_str();
    app.add_option("--rho", flags.rho, "Penalty growth factor")->capture_default_str();
    app.add_option("--eps-inner", flags.eps_inner, "Inner relative-change tolerance")->capture_default_str();
    app.add_option("--eps-outer", flags.eps_outer, "Outer feasibility-gap tolerance")->capture_default_str();
    app.add_option("--k1", flags.k1, "Nonzeros per column of each view matrix")->capture_default_str();
    app.add_option("--k2", flags.k2, "Consensus rank bound, N or Nx (N times k_c)")->capture_default_str();
    app.add_option("--max-outer", flags.max_outer)->capture_default_str();
    app.add_option("--max-inner", flags.max_inner)->capture_default_str();
    app.add_option("--kappa", flags.kappa, "kNN count of the initial affinities")->capture_default_str();
    app.add_option("--bandwidth", flags.bandwidth, "Gaussian width (0: median heuristic)")->capture_default_str();
    app.add_option("--seed", flags.seed)->capture_default_str();
    app.add_option("--threads", flags.threads, "Worker threads (default: CLLSR_THREADS or cores)")
        ->capture_default_str();

    std::string data, out_dir;
    int repeats = 1;
    int restarts = 20;

    auto* run = app.add_subcommand("run", "Solve, cluster and score a dataset");
    run->add_option("--data", data, "Dataset manifest")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--repeats", repeats, "Clustering repeats")->capture_default_str();
    run->add_option("--restarts", restarts, "k-means restarts")->capture_default_str();
    bool emit_heatmap = false, emit_trace = false, no_labels = false;
    double threshold = 1e-4;
    run->add_flag("--heatmap", emit_heatmap, "Write consensus.csv and heatmap.pgm");
    run->add_flag("--trace", emit_trace, "Write trace.csv and convergence series");
    run->add_flag("--no-labels", no_labels, "Do not write labels.txt");
    run->add_option("--threshold", threshold, "Heatmap truncation threshold")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Parameter grid over (lambda, k1, k2)");
    std::string lambdas = "0.1,1,10,100,1000", k1s = "5,10,20,30", k2s = "10x,20x,30x,40x";
    sweep->add_option("--data", data, "Dataset manifest")->required();
    sweep->add_option("--out", out_dir, "Output directory")->required();
    sweep->add_option("--repeats", repeats)->capture_default_str();
    sweep->add_option("--restarts", restarts)->capture_default_str();
    sweep->add_option("--lambdas", lambdas)->capture_default_str();
    sweep->add_option("--k1s", k1s)->capture_default_str();
    sweep->add_option("--k2s", k2s)->capture_default_str();

    auto* eval = app.add_subcommand("eval", "Score predicted labels against ground truth");
    std::string pred_path, truth_path;
    eval->add_option("--pred", pred_path)->required();
    eval->add_option("--truth", truth_path)->required();

    auto* heatmap = app.add_subcommand("heatmap", "Render an affinity matrix file as a PGM");
    std::string matrix_path, image_path;
    heatmap->add_option("--matrix", matrix_path)->required();
    heatmap->add_option("--out", image_path, "Output .pgm path")->required();
    heatmap->add_option("--threshold", threshold)->capture_default_str();

    auto* trace_export = app.add_subcommand("trace-export", "Split a trace into POF and OEF series");
    std::string trace_path;
    trace_export->add_option("--trace", trace_path)->required();
    trace_export->add_option("--out", out_dir)->required();

    auto* synth = app.add_subcommand("synth", "Write a synthetic union-of-subspaces dataset");
    SynthOptions synth_opts;
    synth->add_option("--out", out_dir)->required();
    synth->add_option("--clusters", synth_opts.num_clusters)->capture_default_str();
    synth->add_option("--per-cluster", synth_opts.per_cluster)->capture_default_str();
    synth->add_option("--views", synth_opts.num_views)->capture_default_str();
    synth->add_option("--noise", synth_opts.noise)->capture_default_str();
    synth->add_option("--subspace-dim", synth_opts.subspace_dim)->capture_default_str();
    synth->add_option("--features", synth_opts.base_features)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run || *sweep) {
            const MultiviewDataset ds = load(data);
            require(ds.labels.has_value(), ErrorCode::InvalidArgument,
                    "the manifest must list a labels file");
            ExperimentConfig cfg;
            cfg.solver = flags.to_config(ds.num_classes());
            cfg.repeats = repeats;
            cfg.kmeans_restarts = restarts;
            cfg.output_dir = out_dir;
            cfg.emit_heatmap = emit_heatmap;
            cfg.emit_trace = emit_trace;
            cfg.emit_labels = !no_labels;
            cfg.heatmap_threshold = threshold;

            if (*run) {
                const auto res = run_experiment(ds, cfg);
                if (!res.solve.converged)
                    std::cerr << "warning: outer tolerance not reached after " << res.solve.outer_iterations
                              << " outer iterations (gap " << feasibility_gap(res.solve.state) << ")\n";
                std::cout << res.report.summary() << '\n';
            } else {
                SweepGrid grid;
                grid.lambdas = parse_list<double>(lambdas, parse_double);
                grid.k1s = parse_list<Index>(k1s, parse_index);
                grid.k2s = parse_list<RankSpec>(k2s, RankSpec::parse);
                std::filesystem::create_directories(out_dir);
                const auto rows = parameter_sweep(ds, cfg, grid, flags.threads);
                write_sweep_table(std::filesystem::path(out_dir) / "sweep.csv", rows);
                for (const auto& r : rows) {
                    std::cout << "lambda=" << r.lambda << " k1=" << r.k1 << " k2=" << r.k2 << "  ";
                    std::cout << (r.report ? r.report->summary() : r.status) << '\n';
                }
            }
        } else if (*eval) {
            const Labels pred = io::read_labels(pred_path);
            const Labels truth = io::read_labels(truth_path);
            const Scores s = evaluate(pred, truth);
            std::cout << "acc,nmi,fs,ari\n"
                      << io::format_real(s.acc) << ',' << io::format_real(s.nmi) << ','
                      << io::format_real(s.fs) << ',' << io::format_real(s.ari) << '\n';
        } else if (*heatmap) {
            cllsr::emit_heatmap(io::read_matrix(matrix_path), threshold, image_path);
        } else if (*trace_export) {
            const auto [pof, oef] = emit_convergence(ConvergenceTrace::read(trace_path), out_dir);
            std::cout << pof.string() << '\n' << oef.string() << '\n';
        } else if (*synth) {
            synth_opts.seed = flags.seed;
            const auto manifest = save_dataset(synthesize_dataset(synth_opts), out_dir, "view");
            std::cout << (std::filesystem::path(out_dir) / "view.manifest").string() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
