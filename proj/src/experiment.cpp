#include <cllsr/experiment.hpp>
#include <cllsr/io.hpp>
#include <cllsr/parallel.hpp>

#include <cmath>
#include <fstream>

namespace cllsr {

void ExperimentConfig::validate() const
{
    require(repeats >= 1, ErrorCode::InvalidArgument, "repeats must be >= 1");
    require(kmeans_restarts >= 1, ErrorCode::InvalidArgument, "k-means restarts must be >= 1");
    require(heatmap_threshold >= 0, ErrorCode::InvalidArgument, "heatmap threshold must be >= 0");
}

std::uint64_t derive_seed(std::uint64_t base, int repeat)
{
    // splitmix64 finalizer over (base, repeat)
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(repeat) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

ExperimentResult run_preprocessed(const MultiviewDataset& ds, const ExperimentConfig& cfg)
{
    cfg.validate();
    require(ds.labels.has_value(), ErrorCode::InvalidArgument,
            "experiments need ground-truth labels for k_c and the metrics");
    const int k_c = ds.num_classes();

    ExperimentResult out;
    out.solve = solve(ds, cfg.solver);
    const MatrixXd affinity = fuse(out.solve.state.consensus);
    const MatrixXd embedding = spectral_embedding(affinity, k_c);
    for (int r = 0; r < cfg.repeats; ++r) {
        Labels labels = kmeans(embedding, k_c, cfg.kmeans_restarts, derive_seed(cfg.solver.seed, r)).labels;
        out.runs.push_back(evaluate(labels, *ds.labels, cfg.nmi_norm));
        if (r == 0) out.labels = std::move(labels);
    }
    out.report = MetricReport::from(out.runs);
    return out;
}

void write_outputs(const ExperimentResult& res, const ExperimentConfig& cfg)
{
    if (cfg.output_dir.empty()) return;
    const auto& dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.txt");
        require(static_cast<bool>(out), ErrorCode::WriteFailure, (dir / "report.txt").string());
        out << res.report.summary() << '\n';
    }
    {
        std::ofstream out(dir / "report.csv");
        require(static_cast<bool>(out), ErrorCode::WriteFailure, (dir / "report.csv").string());
        out << MetricReport::csv_header() << '\n' << res.report.csv_row() << '\n';
    }
    {
        std::ofstream out(dir / "runs.csv");
        require(static_cast<bool>(out), ErrorCode::WriteFailure, (dir / "runs.csv").string());
        out << "repeat,acc,nmi,fs,ari\n";
        for (std::size_t r = 0; r < res.runs.size(); ++r) {
            const auto& s = res.runs[r];
            out << r << ',' << io::format_real(s.acc) << ',' << io::format_real(s.nmi) << ','
                << io::format_real(s.fs) << ',' << io::format_real(s.ari) << '\n';
        }
    }
    if (cfg.emit_labels) io::write_labels(dir / "labels.txt", res.labels);
    if (cfg.emit_heatmap) {
        io::write_matrix(dir / "consensus.csv", res.solve.state.consensus);
        emit_heatmap(res.solve.state.consensus, cfg.heatmap_threshold, dir / "heatmap.pgm");
    }
    if (cfg.emit_trace) {
        res.solve.trace.write(dir / "trace.csv");
        emit_convergence(res.solve.trace, dir, "trace");
    }
}

} // namespace

ExperimentResult run_experiment(const MultiviewDataset& raw, const ExperimentConfig& cfg)
{
    ExperimentResult res = run_preprocessed(preprocess(raw), cfg);
    write_outputs(res, cfg);
    return res;
}

MatrixXd heatmap_transform(const MatrixXd& c, double threshold)
{
    MatrixXd kept = (c.array() < threshold).select(0.0, c);
    kept = kept.cwiseMax(0.0);
    const double max = kept.maxCoeff();
    if (max <= 0) return MatrixXd::Zero(c.rows(), c.cols());
    if (max >= 1) kept /= max * (1 + 1e-6);
    const double log_max = std::log(kept.maxCoeff());
    MatrixXd out = MatrixXd::Zero(c.rows(), c.cols());
    for (Index j = 0; j < c.cols(); ++j)
        for (Index i = 0; i < c.rows(); ++i)
            if (kept(i, j) > 0) out(i, j) = log_max / std::log(kept(i, j));
    return out;
}

void write_pgm(const std::filesystem::path& path, const MatrixXd& values)
{
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::WriteFailure, path.string());
    out << "P5\n" << values.cols() << ' ' << values.rows() << "\n255\n";
    std::string row(static_cast<std::size_t>(values.cols()), '\0');
    for (Index i = 0; i < values.rows(); ++i) {
        for (Index j = 0; j < values.cols(); ++j) {
            const double v = std::clamp(values(i, j), 0.0, 1.0);
            row[j] = static_cast<char>(static_cast<unsigned char>(std::lround(255 * v)));
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    require(static_cast<bool>(out), ErrorCode::WriteFailure, path.string());
}

MatrixXd read_pgm(const std::filesystem::path& path)
{
    require(std::filesystem::exists(path), ErrorCode::FileMissing, path.string());
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    Index w = 0, h = 0;
    int maxval = 0;
    in >> magic >> w >> h >> maxval;
    require(in && magic == "P5" && maxval == 255 && w > 0 && h > 0, ErrorCode::ParseError,
            path.string() + ": not an 8-bit binary PGM");
    in.get();
    MatrixXd m(h, w);
    std::string row(static_cast<std::size_t>(w), '\0');
    for (Index i = 0; i < h; ++i) {
        in.read(row.data(), w);
        require(static_cast<bool>(in), ErrorCode::ParseError, path.string() + ": truncated PGM");
        for (Index j = 0; j < w; ++j) m(i, j) = static_cast<unsigned char>(row[j]) / 255.0;
    }
    return m;
}

void emit_heatmap(const MatrixXd& c_star, double threshold, const std::filesystem::path& path)
{
    require(c_star.rows() == c_star.cols(), ErrorCode::ShapeMismatch, "heatmap needs a square matrix");
    write_pgm(path, heatmap_transform(c_star, threshold));
}

ConvergenceSeries convergence_series(const ConvergenceTrace& trace)
{
    require(!trace.records.empty(), ErrorCode::InvalidArgument, "empty convergence trace");
    ConvergenceSeries s;
    s.pof = trace.records;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& r = trace.records[i];
        const bool last_of_outer = i + 1 == trace.records.size() || trace.records[i + 1].outer != r.outer;
        if (last_of_outer && r.outer >= 1) s.oef.emplace_back(r.outer, r.gap);
    }
    return s;
}

std::pair<std::filesystem::path, std::filesystem::path> emit_convergence(
    const ConvergenceTrace& trace, const std::filesystem::path& dir, const std::string& stem)
{
    const auto series = convergence_series(trace);
    std::filesystem::create_directories(dir);
    const auto pof_path = dir / (stem + "_pof.csv");
    const auto oef_path = dir / (stem + "_oef.csv");
    {
        std::ofstream out(pof_path);
        require(static_cast<bool>(out), ErrorCode::WriteFailure, pof_path.string());
        out << "k,l,sigma,q\n";
        for (const auto& r : series.pof)
            out << r.outer << ',' << r.inner << ',' << io::format_real(r.sigma) << ','
                << io::format_real(r.objective) << '\n';
    }
    {
        std::ofstream out(oef_path);
        require(static_cast<bool>(out), ErrorCode::WriteFailure, oef_path.string());
        out << "k,gap\n";
        for (const auto& [k, gap] : series.oef) out << k << ',' << io::format_real(gap) << '\n';
    }
    return {pof_path, oef_path};
}

ConvergenceSeries read_convergence(const std::filesystem::path& pof, const std::filesystem::path& oef)
{
    auto rows = [](const std::filesystem::path& path, std::size_t width) {
        require(std::filesystem::exists(path), ErrorCode::FileMissing, path.string());
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);
        std::vector<std::vector<std::string>> out;
        while (std::getline(in, line)) {
            auto cells = io::split_cells(line);
            if (cells.empty()) continue;
            require(cells.size() == width, ErrorCode::ParseError, path.string() + ": bad row");
            out.push_back(std::move(cells));
        }
        return out;
    };
    ConvergenceSeries s;
    try {
        for (const auto& c : rows(pof, 4))
            s.pof.push_back({std::stoi(c[0]), std::stoi(c[1]), std::stod(c[2]), std::stod(c[3]), 0, 0});
        for (const auto& c : rows(oef, 2)) s.oef.emplace_back(std::stoi(c[0]), std::stod(c[1]));
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::ParseError, "malformed convergence series");
    }
    return s;
}

std::string RankSpec::to_string() const
{
    return std::to_string(value) + (times_clusters ? "x" : "");
}

RankSpec RankSpec::parse(const std::string& text)
{
    RankSpec spec;
    std::string digits = text;
    if (!digits.empty() && (digits.back() == 'x' || digits.back() == 'X')) {
        spec.times_clusters = true;
        digits.pop_back();
    }
    std::size_t used = 0;
    try {
        spec.value = std::stol(digits, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used > 0 && used == digits.size() && spec.value >= 1, ErrorCode::ParseError,
            "bad rank value '" + text + "' (expected N or Nx)");
    return spec;
}

void SweepGrid::validate() const
{
    require(!lambdas.empty() && !k1s.empty() && !k2s.empty(), ErrorCode::InvalidArgument,
            "sweep grid axes must be nonempty");
    for (double l : lambdas) require(l > 0, ErrorCode::InvalidArgument, "sweep lambda must be > 0");
    for (Index k : k1s) require(k >= 1, ErrorCode::InvalidArgument, "sweep k1 must be >= 1");
}

std::vector<SweepRow> parameter_sweep(const MultiviewDataset& raw, const ExperimentConfig& cfg,
                                      const SweepGrid& grid, int workers)
{
    grid.validate();
    const MultiviewDataset ds = preprocess(raw);
    require(ds.labels.has_value(), ErrorCode::InvalidArgument, "sweeps need ground-truth labels");
    const Index n = ds.num_samples();
    const int k_c = ds.num_classes();

    std::vector<SweepRow> rows;
    for (double lambda : grid.lambdas)
        for (Index k1 : grid.k1s)
            for (const auto& k2 : grid.k2s) rows.push_back({lambda, k1, k2.resolve(k_c), "", {}});

    ExperimentConfig cell_cfg = cfg;
    cell_cfg.output_dir.clear();
    if (workers > 1) cell_cfg.solver.threads = 1;

    parallel_for(static_cast<long>(rows.size()), workers, [&](long i) {
        auto& row = rows[i];
        if (row.k1 >= n) {
            row.status = "skipped: k1 >= n";
            return;
        }
        if (row.k2 > n) {
            row.status = "skipped: k2 > n";
            return;
        }
        ExperimentConfig c = cell_cfg;
        c.solver.lambda = row.lambda;
        c.solver.k1 = row.k1;
        c.solver.k2 = row.k2;
        try {
            row.report = run_preprocessed(ds, c).report;
            row.status = "ok";
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
    });
    return rows;
}

void write_sweep_table(const std::filesystem::path& path, const std::vector<SweepRow>& rows)
{
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::WriteFailure, path.string());
    out << "lambda,k1,k2,status," << MetricReport::csv_header() << '\n';
    for (const auto& r : rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        out << io::format_real(r.lambda) << ',' << r.k1 << ',' << r.k2 << ',' << status << ',';
        if (r.report) {
            out << r.report->csv_row();
        } else {
            out << ",,,,,,,,";
        }
        out << '\n';
    }
    require(static_cast<bool>(out), ErrorCode::WriteFailure, path.string());
}

} // namespace cllsr
