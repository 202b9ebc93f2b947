#include <cllsr/io.hpp>
#include <cllsr/metrics.hpp>

#include <cmath>
#include <cstdio>
#include <limits>

namespace cllsr {
namespace {

void check_lengths(const Labels& pred, const Labels& truth)
{
    require(pred.size() == truth.size(), ErrorCode::LengthMismatch,
            "label sequences differ in length (" + std::to_string(pred.size()) + " vs " +
                std::to_string(truth.size()) + ")");
    require(!pred.empty(), ErrorCode::LengthMismatch, "empty label sequences");
}

double choose2(double x) { return 0.5 * x * (x - 1); }

struct PairCounts
{
    double same_both = 0;  // pairs together in pred and truth
    double same_pred = 0;
    double same_truth = 0;
    double total = 0;
};

PairCounts pair_counts(const Eigen::MatrixXi& table, std::size_t n)
{
    PairCounts pc;
    for (Index i = 0; i < table.rows(); ++i)
        for (Index j = 0; j < table.cols(); ++j) pc.same_both += choose2(table(i, j));
    for (Index i = 0; i < table.rows(); ++i) pc.same_pred += choose2(table.row(i).sum());
    for (Index j = 0; j < table.cols(); ++j) pc.same_truth += choose2(table.col(j).sum());
    pc.total = choose2(static_cast<double>(n));
    return pc;
}

} // namespace

Eigen::MatrixXi contingency_table(const Labels& pred, const Labels& truth)
{
    check_lengths(pred, truth);
    const Labels p = io::compact_labels(pred);
    const Labels t = io::compact_labels(truth);
    const int kp = *std::max_element(p.begin(), p.end()) + 1;
    const int kt = *std::max_element(t.begin(), t.end()) + 1;
    Eigen::MatrixXi table = Eigen::MatrixXi::Zero(kp, kt);
    for (std::size_t i = 0; i < p.size(); ++i) ++table(p[i], t[i]);
    return table;
}

std::vector<int> hungarian_assignment(const MatrixXd& cost)
{
    const int n = static_cast<int>(cost.rows());
    require(cost.cols() == n, ErrorCode::InvalidArgument, "hungarian: cost must be square");
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials formulation; column 0 is a sentinel.
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int row = 1; row <= n; ++row) {
        match[0] = row;
        int col0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[col0] = true;
            const int r = match[col0];
            double delta = inf;
            int col1 = 0;
            for (int c = 1; c <= n; ++c) {
                if (used[c]) continue;
                const double cur = cost(r - 1, c - 1) - u[r] - v[c];
                if (cur < minv[c]) {
                    minv[c] = cur;
                    way[c] = col0;
                }
                if (minv[c] < delta) {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for (int c = 0; c <= n; ++c) {
                if (used[c]) {
                    u[match[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const int col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0);
    }
    std::vector<int> assignment(n, -1);
    for (int c = 1; c <= n; ++c)
        if (match[c]) assignment[match[c] - 1] = c - 1;
    return assignment;
}

double accuracy(const Labels& pred, const Labels& truth)
{
    const Eigen::MatrixXi table = contingency_table(pred, truth);
    const Index k = std::max(table.rows(), table.cols());
    MatrixXd cost = MatrixXd::Zero(k, k);
    cost.topLeftCorner(table.rows(), table.cols()) = -table.cast<double>();
    const auto assignment = hungarian_assignment(cost);
    double correct = 0;
    for (Index r = 0; r < table.rows(); ++r)
        if (assignment[r] < table.cols()) correct += table(r, assignment[r]);
    return correct / static_cast<double>(pred.size());
}

double nmi(const Labels& pred, const Labels& truth, NmiNormalization norm)
{
    const Eigen::MatrixXi table = contingency_table(pred, truth);
    const double n = static_cast<double>(pred.size());
    auto entropy = [n](const Eigen::VectorXi& counts) {
        double h = 0;
        for (Index i = 0; i < counts.size(); ++i)
            if (counts(i) > 0) h -= counts(i) / n * std::log(counts(i) / n);
        return h;
    };
    const Eigen::VectorXi row_sums = table.rowwise().sum();
    const Eigen::VectorXi col_sums = table.colwise().sum().transpose();
    if (row_sums.size() == 1 || col_sums.size() == 1) return 0.0;
    const double hp = entropy(row_sums);
    const double ht = entropy(col_sums);
    double mi = 0;
    for (Index i = 0; i < table.rows(); ++i)
        for (Index j = 0; j < table.cols(); ++j)
            if (table(i, j) > 0)
                mi += table(i, j) / n * std::log(n * table(i, j) / (double(row_sums(i)) * col_sums(j)));
    double denom = 0;
    switch (norm) {
        case NmiNormalization::Sqrt: denom = std::sqrt(hp * ht); break;
        case NmiNormalization::Max: denom = std::max(hp, ht); break;
        case NmiNormalization::Arithmetic: denom = 0.5 * (hp + ht); break;
    }
    if (denom <= 0) return 0.0;
    return std::clamp(mi / denom, 0.0, 1.0);
}

double f_measure(const Labels& pred, const Labels& truth)
{
    const auto pc = pair_counts(contingency_table(pred, truth), pred.size());
    // no co-clustered pair on either side: the partitions agree on every pair
    if (pc.same_pred == 0 && pc.same_truth == 0) return 1.0;
    if (pc.same_pred == 0 || pc.same_truth == 0) return 0.0;
    const double precision = pc.same_both / pc.same_pred;
    const double recall = pc.same_both / pc.same_truth;
    if (precision + recall == 0) return 0.0;
    return 2 * precision * recall / (precision + recall);
}

double ari(const Labels& pred, const Labels& truth)
{
    const auto pc = pair_counts(contingency_table(pred, truth), pred.size());
    if (pc.total == 0) return 1.0;
    const double expected = pc.same_pred * pc.same_truth / pc.total;
    const double max_index = 0.5 * (pc.same_pred + pc.same_truth);
    if (max_index == expected) return 1.0;
    return (pc.same_both - expected) / (max_index - expected);
}

Scores evaluate(const Labels& pred, const Labels& truth, NmiNormalization norm)
{
    return {accuracy(pred, truth), nmi(pred, truth, norm), f_measure(pred, truth), ari(pred, truth)};
}

MetricReport MetricReport::from(const std::vector<Scores>& runs)
{
    require(!runs.empty(), ErrorCode::InvalidArgument, "metric report of zero runs");
    auto summarize = [&](double Scores::*field) {
        const double count = static_cast<double>(runs.size());
        double mean = 0;
        for (const auto& s : runs) mean += s.*field;
        mean /= count;
        double var = 0;
        for (const auto& s : runs) var += (s.*field - mean) * (s.*field - mean);
        return MeanStd{mean, runs.size() > 1 ? std::sqrt(var / (count - 1)) : 0.0};
    };
    MetricReport r;
    r.acc = summarize(&Scores::acc);
    r.nmi = summarize(&Scores::nmi);
    r.fs = summarize(&Scores::fs);
    r.ari = summarize(&Scores::ari);
    r.repeats = static_cast<int>(runs.size());
    return r;
}

std::string MetricReport::summary() const
{
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "ACC %.4f(%.4f)  NMI %.4f(%.4f)  Fs %.4f(%.4f)  ARI %.4f(%.4f)  [%d repeats]",
                  acc.mean, acc.std, nmi.mean, nmi.std, fs.mean, fs.std, ari.mean, ari.std, repeats);
    return buf;
}

std::string MetricReport::csv_header()
{
    return "acc_mean,acc_std,nmi_mean,nmi_std,fs_mean,fs_std,ari_mean,ari_std,repeats";
}

std::string MetricReport::csv_row() const
{
    std::string row;
    for (const MeanStd* m : {&acc, &nmi, &fs, &ari})
        row += io::format_real(m->mean) + "," + io::format_real(m->std) + ",";
    return row + std::to_string(repeats);
}

} // namespace cllsr
