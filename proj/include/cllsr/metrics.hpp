#pragma once

#include <cllsr/data.hpp>

#include <string>
#include <vector>

namespace cllsr {

/// Rows: predicted clusters, columns: true classes.
Eigen::MatrixXi contingency_table(const Labels& pred, const Labels& truth);

/*
 * Minimum-cost perfect assignment on a square cost matrix (Hungarian method
 * with potentials). Returns assignment[row] = column.
 */
std::vector<int> hungarian_assignment(const MatrixXd& cost);

/// Fraction of samples correct under the optimal cluster-to-class matching.
double accuracy(const Labels& pred, const Labels& truth);

enum class NmiNormalization { Sqrt, Max, Arithmetic };

/// Mutual information over an entropy normalizer; 0 when either side has one cluster.
double nmi(const Labels& pred, const Labels& truth, NmiNormalization norm = NmiNormalization::Sqrt);

/*
 * Pairwise F1 over unordered sample pairs. 1 when neither side has a
 * co-clustered pair (both all singletons), 0 when only one side has none.
 */
double f_measure(const Labels& pred, const Labels& truth);

/// Adjusted Rand index; 1 when both partitions are the same single cluster.
double ari(const Labels& pred, const Labels& truth);

struct Scores
{
    double acc = 0;
    double nmi = 0;
    double fs = 0;
    double ari = 0;
};

Scores evaluate(const Labels& pred, const Labels& truth,
                NmiNormalization norm = NmiNormalization::Sqrt);

struct MeanStd
{
    double mean = 0;
    double std = 0;  // sample standard deviation, 0 for a single repeat
};

struct MetricReport
{
    MeanStd acc, nmi, fs, ari;
    int repeats = 0;

    static MetricReport from(const std::vector<Scores>& runs);

    /// One-line "ACC NMI Fs ARI" summary in means(standard deviations) form.
    std::string summary() const;
    /// "acc_mean,acc_std,nmi_mean,..." header and row.
    static std::string csv_header();
    std::string csv_row() const;
};

} // namespace cllsr
