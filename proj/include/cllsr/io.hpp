#pragma once

#include <cllsr/data.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace cllsr::io {

/// Parses a delimited numeric matrix: one row per line, cells separated by
/// commas and/or whitespace. Blank lines and lines starting with '#' are skipped.
MatrixXd read_matrix(const std::filesystem::path& path);

/// Writes comma-separated rows with 17 significant digits (exact round-trip).
void write_matrix(const std::filesystem::path& path, const MatrixXd& m);

Labels read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const Labels& labels);

/// Maps arbitrary integer class ids onto 0..k-1 preserving their order.
Labels compact_labels(const Labels& raw);

/// Shortest decimal form that parses back to the same double.
std::string format_real(double v);

std::vector<std::string> split_cells(const std::string& line);

} // namespace cllsr::io
