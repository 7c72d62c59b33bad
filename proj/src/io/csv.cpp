#include "lsr/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include "lsr/error.hpp"

namespace lsr::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

DenseMatrix read_dense_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open csv file: " + path.string());

    std::vector<std::vector<f32>> rows;
    std::string line;
    long line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = trim(line);
        if (stripped.empty()) continue;
        std::vector<f32> row;
        std::size_t pos = 0;
        while (pos <= stripped.size()) {
            std::size_t comma = stripped.find(',', pos);
            if (comma == std::string_view::npos) comma = stripped.size();
            const std::string_view tok = trim(stripped.substr(pos, comma - pos));
            f64 v = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || ptr != tok.data() + tok.size())
                throw ParseError("expected a number, got '" + std::string(tok) + "'", line_no);
            if (!std::isfinite(v)) throw ParseError("non-finite value", line_no);
            row.push_back(static_cast<f32>(v));
            pos = comma + 1;
        }
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw ParseError("row has " + std::to_string(row.size()) + " fields, expected " +
                                 std::to_string(width),
                             line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("csv file holds no data rows", line_no);

    DenseMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return m;
}

std::vector<Index> read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open label file: " + path.string());
    std::vector<Index> labels;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view tok = trim(line);
        if (tok.empty()) continue;
        Index v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw ParseError("expected an integer label, got '" + std::string(tok) + "'", line_no);
        if (v < 0) throw ParseError("labels must be nonnegative", line_no);
        labels.push_back(v);
    }
    if (labels.empty()) throw ParseError("label file holds no labels", line_no);
    return labels;
}

void write_dense_csv(const std::filesystem::path& path, const DenseMatrix& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StorageError("cannot open csv file for writing: " + path.string());
    char buf[48];
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.9g", static_cast<f64>(m(i, j)));
            out << buf;
            if (j + 1 < m.cols()) out << ',';
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw StorageError("write failure on csv file: " + path.string());
}

}  // namespace lsr::io
