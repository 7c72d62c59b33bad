#include "lsr/io/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "lsr/error.hpp"

namespace lsr::io {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

u64 parse_u64(std::string_view tok, long line) {
    u64 v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError("expected a nonnegative integer, got '" + std::string(tok) + "'", line);
    return v;
}

f64 parse_value(std::string_view tok, bool integer_field, long line) {
    if (integer_field) {
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw ParseError("expected an integer value, got '" + std::string(tok) + "'", line);
        return static_cast<f64>(v);
    }
    f64 v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError("expected a real value, got '" + std::string(tok) + "'", line);
    return v;
}

struct LineSource {
    std::ifstream in;
    long line_no = 0;

    explicit LineSource(const std::filesystem::path& path) : in(path) {
        if (!in)
            throw StorageError("cannot open matrix market file: " + path.string());
    }

    // Next non-comment, non-blank line. Returns false at end of file.
    bool next_data_line(std::string& out) {
        while (std::getline(in, out)) {
            ++line_no;
            const auto first = out.find_first_not_of(" \t\r\n");
            if (first == std::string::npos) continue;
            if (out[first] == '%') continue;
            return true;
        }
        return false;
    }
};

}  // namespace

Matrix read_matrix_market(const std::filesystem::path& path) {
    LineSource src(path);

    std::string header;
    if (!std::getline(src.in, header))
        throw ParseError("empty matrix market file", 1);
    src.line_no = 1;
    const auto head_toks = split_ws(header);
    if (head_toks.size() != 5 || lower(head_toks[0]) != "%%matrixmarket")
        throw ParseError("malformed banner, expected '%%MatrixMarket matrix <format> <field> <symmetry>'", 1);
    if (lower(head_toks[1]) != "matrix")
        throw ParseError("unsupported object '" + std::string(head_toks[1]) + "'", 1);
    const std::string format = lower(head_toks[2]);
    const std::string field = lower(head_toks[3]);
    const std::string symmetry = lower(head_toks[4]);

    if (format != "coordinate" && format != "array")
        throw ParseError("unsupported format '" + format + "'", 1);
    if (field != "real" && field != "integer" && field != "pattern")
        throw ParseError("unsupported field '" + field + "'", 1);
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError("unsupported symmetry '" + symmetry + "'", 1);
    if (format == "array" && field == "pattern")
        throw ParseError("array format cannot carry a pattern field", 1);

    const bool integer_field = field == "integer";
    const bool pattern = field == "pattern";
    const bool symmetric = symmetry == "symmetric";

    std::string line;
    if (!src.next_data_line(line))
        throw ParseError("missing size line", src.line_no);
    const auto size_toks = split_ws(line);

    if (format == "coordinate") {
        if (size_toks.size() != 3)
            throw ParseError("coordinate size line must be 'rows cols nnz'", src.line_no);
        const u64 rows = parse_u64(size_toks[0], src.line_no);
        const u64 cols = parse_u64(size_toks[1], src.line_no);
        const u64 nnz = parse_u64(size_toks[2], src.line_no);
        if (symmetric && rows != cols)
            throw ParseError("symmetric matrix must be square", src.line_no);

        std::vector<Triplet> triplets;
        triplets.reserve(symmetric ? 2 * nnz : nnz);
        for (u64 t = 0; t < nnz; ++t) {
            if (!src.next_data_line(line))
                throw ParseError("expected " + std::to_string(nnz) + " entries, file ends after " +
                                     std::to_string(t),
                                 src.line_no);
            const auto toks = split_ws(line);
            const std::size_t want = pattern ? 2 : 3;
            if (toks.size() != want)
                throw ParseError("coordinate entry must have " + std::to_string(want) + " fields",
                                 src.line_no);
            const u64 i = parse_u64(toks[0], src.line_no);
            const u64 j = parse_u64(toks[1], src.line_no);
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw ParseError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                     ") outside " + std::to_string(rows) + "x" + std::to_string(cols),
                                 src.line_no);
            const f64 v = pattern ? 1.0 : parse_value(toks[2], integer_field, src.line_no);
            if (!std::isfinite(v))
                throw ParseError("non-finite value", src.line_no);
            if (symmetric && i < j)
                throw ParseError("symmetric coordinate file must store the lower triangle only",
                                 src.line_no);
            triplets.push_back({i - 1, j - 1, static_cast<f32>(v)});
            if (symmetric && i != j) triplets.push_back({j - 1, i - 1, static_cast<f32>(v)});
        }
        if (src.next_data_line(line))
            throw ParseError("trailing data after declared " + std::to_string(nnz) + " entries",
                             src.line_no);
        return SparseColMatrix::from_triplets(static_cast<Index>(rows), static_cast<Index>(cols),
                                              triplets);
    }

    // Array format: dense, values in column-major order.
    if (size_toks.size() != 2)
        throw ParseError("array size line must be 'rows cols'", src.line_no);
    const u64 rows = parse_u64(size_toks[0], src.line_no);
    const u64 cols = parse_u64(size_toks[1], src.line_no);
    if (symmetric && rows != cols)
        throw ParseError("symmetric matrix must be square", src.line_no);

    DenseMatrix d(static_cast<Index>(rows), static_cast<Index>(cols));
    auto next_value = [&]() -> f64 {
        if (!src.next_data_line(line))
            throw ParseError("file ends before all array values were read", src.line_no);
        const auto toks = split_ws(line);
        if (toks.size() != 1)
            throw ParseError("array format expects one value per line", src.line_no);
        const f64 v = parse_value(toks[0], integer_field, src.line_no);
        if (!std::isfinite(v))
            throw ParseError("non-finite value", src.line_no);
        return v;
    };

    if (!symmetric) {
        for (u64 j = 0; j < cols; ++j)
            for (u64 i = 0; i < rows; ++i)
                d(static_cast<Index>(i), static_cast<Index>(j)) = static_cast<f32>(next_value());
    } else {
        // Lower triangle per column; mirror into the upper triangle.
        for (u64 j = 0; j < cols; ++j) {
            for (u64 i = j; i < rows; ++i) {
                const f32 v = static_cast<f32>(next_value());
                d(static_cast<Index>(i), static_cast<Index>(j)) = v;
                d(static_cast<Index>(j), static_cast<Index>(i)) = v;
            }
        }
    }
    if (src.next_data_line(line))
        throw ParseError("trailing data after full array", src.line_no);
    return d;
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw StorageError("cannot open matrix market file for writing: " + path.string());
    char buf[64];
    if (const auto* s = std::get_if<SparseColMatrix>(&m)) {
        out << "%%MatrixMarket matrix coordinate real general\n";
        out << s->rows() << ' ' << s->cols() << ' ' << s->nnz() << '\n';
        for (Index j = 0; j < s->cols(); ++j) {
            const auto rows = s->col_rows(j);
            const auto vals = s->col_vals(j);
            for (std::size_t t = 0; t < rows.size(); ++t) {
                std::snprintf(buf, sizeof(buf), "%" PRIu64 " %" PRId64 " %.9g\n", rows[t] + 1,
                              static_cast<std::int64_t>(j) + 1, static_cast<f64>(vals[t]));
                out << buf;
            }
        }
    } else {
        const auto& d = std::get<DenseMatrix>(m);
        out << "%%MatrixMarket matrix array real general\n";
        out << d.rows() << ' ' << d.cols() << '\n';
        for (Index j = 0; j < d.cols(); ++j) {
            for (Index i = 0; i < d.rows(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.9g\n", static_cast<f64>(d(i, j)));
                out << buf;
            }
        }
    }
    out.flush();
    if (!out)
        throw StorageError("write failure on matrix market file: " + path.string());
}

}  // namespace lsr::io
