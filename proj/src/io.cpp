#include <cllsr/io.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

namespace cllsr::io {
namespace {

std::ifstream open_input(const std::filesystem::path& path)
{
    require(std::filesystem::exists(path), ErrorCode::FileMissing, path.string());
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::FileMissing, "cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::WriteFailure, "cannot write " + path.string());
    return out;
}

bool skippable(const std::string& line)
{
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string::npos || line[first] == '#';
}

} // namespace

std::vector<std::string> split_cells(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r' || ch == ';') {
            if (!cur.empty()) cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) cells.push_back(std::move(cur));
    return cells;
}

MatrixXd read_matrix(const std::filesystem::path& path)
{
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        std::vector<double> row;
        for (const auto& cell : split_cells(line)) {
            double v = 0;
            const char* first = cell.data();
            if (*first == '+') ++first;
            auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
            require(ec == std::errc() && ptr == cell.data() + cell.size(), ErrorCode::ParseError,
                    path.string() + ":" + std::to_string(lineno) + ": non-numeric cell '" + cell + "'");
            require(std::isfinite(v), ErrorCode::ParseError,
                    path.string() + ":" + std::to_string(lineno) + ": non-finite cell");
            row.push_back(v);
        }
        if (!rows.empty()) {
            require(row.size() == rows.front().size(), ErrorCode::ParseError,
                    path.string() + ":" + std::to_string(lineno) + ": ragged row (" +
                        std::to_string(row.size()) + " cells, expected " +
                        std::to_string(rows.front().size()) + ")");
        }
        rows.push_back(std::move(row));
    }
    require(!rows.empty() && !rows.front().empty(), ErrorCode::ParseError,
            path.string() + ": empty matrix");

    MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

std::string format_real(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_matrix(const std::filesystem::path& path, const MatrixXd& m)
{
    auto out = open_output(path);
    std::string line;
    for (Index i = 0; i < m.rows(); ++i) {
        line.clear();
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) line.push_back(',');
            line += format_real(m(i, j));
        }
        line.push_back('\n');
        out << line;
    }
    require(static_cast<bool>(out), ErrorCode::WriteFailure, path.string());
}

Labels read_labels(const std::filesystem::path& path)
{
    auto in = open_input(path);
    Labels labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        const auto cells = split_cells(line);
        require(cells.size() == 1, ErrorCode::ParseError,
                path.string() + ":" + std::to_string(lineno) + ": expected one integer per line");
        int v = 0;
        const auto& cell = cells.front();
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        require(ec == std::errc() && ptr == cell.data() + cell.size(), ErrorCode::ParseError,
                path.string() + ":" + std::to_string(lineno) + ": not an integer '" + cell + "'");
        labels.push_back(v);
    }
    return labels;
}

void write_labels(const std::filesystem::path& path, const Labels& labels)
{
    auto out = open_output(path);
    for (int v : labels) out << v << '\n';
    require(static_cast<bool>(out), ErrorCode::WriteFailure, path.string());
}

Labels compact_labels(const Labels& raw)
{
    std::map<int, int> ids;
    for (int v : raw) ids.emplace(v, 0);
    int next = 0;
    for (auto& [key, id] : ids) id = next++;
    Labels out(raw.size());
    std::transform(raw.begin(), raw.end(), out.begin(), [&](int v) { return ids.at(v); });
    return out;
}

} // namespace cllsr::io
