#include <cllsr/data.hpp>
#include <cllsr/io.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

namespace cllsr {

int MultiviewDataset::num_classes() const
{
    if (!labels) return 0;
    return static_cast<int>(std::set<int>(labels->begin(), labels->end()).size());
}

void MultiviewDataset::validate() const
{
    require(!views.empty(), ErrorCode::InvalidArgument, "dataset has no views");
    const Index n = views.front().cols();
    for (std::size_t v = 0; v < views.size(); ++v) {
        require(views[v].rows() >= 1 && views[v].cols() >= 1, ErrorCode::InvalidArgument,
                "view " + std::to_string(v + 1) + " is empty");
        require(views[v].cols() == n, ErrorCode::ShapeMismatch,
                "view " + std::to_string(v + 1) + " has " + std::to_string(views[v].cols()) +
                    " samples, view 1 has " + std::to_string(n));
        require(views[v].allFinite(), ErrorCode::NumericalFailure,
                "view " + std::to_string(v + 1) + " has non-finite entries");
    }
    if (labels) {
        require(static_cast<Index>(labels->size()) == n, ErrorCode::ShapeMismatch,
                "labels have length " + std::to_string(labels->size()) + ", expected " +
                    std::to_string(n));
        const int k = num_classes();
        for (int l : *labels)
            require(l >= 0 && l < k, ErrorCode::InvalidArgument,
                    "labels must be contiguous in [0, k_c)");
    }
    require(names.empty() || static_cast<Index>(names.size()) == n, ErrorCode::ShapeMismatch,
            "sample names do not match sample count");
}

DatasetManifest DatasetManifest::read(const std::filesystem::path& path)
{
    require(std::filesystem::exists(path), ErrorCode::FileMissing, path.string());
    std::ifstream in(path);
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path q(p);
        return q.is_absolute() ? q : base / q;
    };

    std::map<int, std::filesystem::path> views;
    DatasetManifest m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        require(eq != std::string::npos, ErrorCode::ParseError, where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("view", 0) == 0 && key.size() > 4) {
            int idx = 0;
            try {
                idx = std::stoi(key.substr(4));
            } catch (const std::exception&) {
                throw Error(ErrorCode::ParseError, where + ": bad view key '" + key + "'");
            }
            require(idx >= 1, ErrorCode::ParseError, where + ": view keys start at view1");
            views[idx] = resolve(value);
        } else if (key == "labels") {
            m.labels_path = resolve(value);
        } else if (key == "orientation") {
            if (value == "samples-as-rows") {
                m.orientation = Orientation::SamplesAsRows;
            } else if (value == "samples-as-columns") {
                m.orientation = Orientation::SamplesAsColumns;
            } else {
                throw Error(ErrorCode::ParseError, where + ": unknown orientation '" + value + "'");
            }
        } else {
            throw Error(ErrorCode::ParseError, where + ": unknown key '" + key + "'");
        }
    }
    int expect = 1;
    for (auto& [idx, p] : views) {
        require(idx == expect++, ErrorCode::ParseError,
                path.string() + ": view keys must be view1..viewV without gaps");
        m.view_paths.push_back(p);
    }
    require(!m.view_paths.empty(), ErrorCode::ParseError, path.string() + ": no view paths");
    return m;
}

void DatasetManifest::write(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::WriteFailure, path.string());
    for (std::size_t v = 0; v < view_paths.size(); ++v)
        out << "view" << v + 1 << " = " << view_paths[v].string() << '\n';
    if (labels_path) out << "labels = " << labels_path->string() << '\n';
    out << "orientation = "
        << (orientation == Orientation::SamplesAsRows ? "samples-as-rows" : "samples-as-columns")
        << '\n';
}

MultiviewDataset load_dataset(const DatasetManifest& manifest)
{
    require(!manifest.view_paths.empty(), ErrorCode::InvalidArgument, "manifest has no views");
    MultiviewDataset ds;
    for (const auto& p : manifest.view_paths) {
        MatrixXd m = io::read_matrix(p);
        if (manifest.orientation == Orientation::SamplesAsRows) m.transposeInPlace();
        ds.views.push_back(std::move(m));
    }
    if (manifest.labels_path) ds.labels = io::compact_labels(io::read_labels(*manifest.labels_path));
    ds.validate();
    return ds;
}

DatasetManifest save_dataset(const MultiviewDataset& ds, const std::filesystem::path& dir,
                             const std::string& stem)
{
    ds.validate();
    std::filesystem::create_directories(dir);
    DatasetManifest m;
    m.orientation = Orientation::SamplesAsColumns;
    for (Index v = 0; v < ds.num_views(); ++v) {
        const std::string name = stem + std::to_string(v + 1) + ".csv";
        io::write_matrix(dir / name, ds.views[v]);
        m.view_paths.emplace_back(name);
    }
    if (ds.labels) {
        io::write_labels(dir / (stem + "_labels.txt"), *ds.labels);
        m.labels_path = stem + "_labels.txt";
    }
    m.write(dir / (stem + ".manifest"));
    for (auto& p : m.view_paths) p = dir / p;
    if (m.labels_path) m.labels_path = dir / *m.labels_path;
    return m;
}

Index preprocess_dimension(const MultiviewDataset& ds)
{
    Index d = std::min<Index>(100, ds.num_samples());
    for (const auto& x : ds.views) d = std::min(d, x.rows());
    return d;
}

MultiviewDataset preprocess(const MultiviewDataset& ds)
{
    ds.validate();
    const Index d = preprocess_dimension(ds);
    MultiviewDataset out;
    out.labels = ds.labels;
    out.names = ds.names;
    out.views.reserve(ds.views.size());
    for (const auto& x : ds.views) out.views.push_back(pca_reduce(x, d));
    return out;
}

MultiviewDataset synthesize_dataset(const SynthOptions& opts)
{
    require(opts.num_clusters >= 2, ErrorCode::InvalidArgument, "synthesize: k_c must be >= 2");
    require(opts.per_cluster >= 3, ErrorCode::InvalidArgument, "synthesize: per_cluster must be >= 3");
    require(opts.num_views >= 1, ErrorCode::InvalidArgument, "synthesize: V must be >= 1");
    require(opts.noise >= 0, ErrorCode::InvalidArgument, "synthesize: noise must be >= 0");
    require(opts.subspace_dim >= 1 && opts.subspace_dim <= opts.base_features,
            ErrorCode::InvalidArgument, "synthesize: subspace_dim must be in [1, base_features]");

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_matrix = [&](Index r, Index c) {
        MatrixXd m(r, c);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) m(i, j) = gauss(rng);
        return m;
    };

    const Index n = Index(opts.num_clusters) * opts.per_cluster;
    MultiviewDataset ds;
    for (int v = 0; v < opts.num_views; ++v) {
        const Index m = opts.base_features + 5 * v;
        MatrixXd x(m, n);
        for (int c = 0; c < opts.num_clusters; ++c) {
            Eigen::HouseholderQR<MatrixXd> qr(random_matrix(m, opts.subspace_dim));
            const MatrixXd basis =
                qr.householderQ() * MatrixXd::Identity(m, opts.subspace_dim);
            const MatrixXd coeff = random_matrix(opts.subspace_dim, opts.per_cluster);
            x.middleCols(Index(c) * opts.per_cluster, opts.per_cluster) = basis * coeff;
        }
        if (opts.noise > 0) x += opts.noise * random_matrix(m, n);
        ds.views.push_back(std::move(x));
    }
    Labels labels(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) labels[i] = static_cast<int>(i / opts.per_cluster);
    ds.labels = std::move(labels);
    return ds;
}

} // namespace cllsr
