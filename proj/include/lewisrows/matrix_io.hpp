#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lewisrows/common.hpp"

namespace lewisrows {

enum class MatrixFormat { kAuto, kMatrixMarket, kCsv };

inline MatrixFormat matrix_format_from_string(const std::string& s) {
    if (s == "auto") return MatrixFormat::kAuto;
    if (s == "matrixmarket" || s == "mtx" || s == "mm") return MatrixFormat::kMatrixMarket;
    if (s == "csv") return MatrixFormat::kCsv;
    throw ValidationError("unknown matrix format '" + s + "' (use auto, matrixmarket, or csv)");
}

namespace detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

inline Matrixd read_matrix_market_stream(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw IoError("MatrixMarket: empty file");
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw IoError("MatrixMarket: missing %%MatrixMarket banner");
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix" || (field != "real" && field != "integer") || symmetry != "general")
        throw IoError("MatrixMarket: only 'matrix ... real|integer general' files are supported");

    std::string line;
    auto next_data_line = [&]() -> bool {
        while (std::getline(in, line)) {
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '%') continue;
            return true;
        }
        return false;
    };
    if (!next_data_line()) throw IoError("MatrixMarket: missing size line");

    if (format == "array") {
        long rows, cols;
        std::istringstream sz(line);
        if (!(sz >> rows >> cols)) throw IoError("MatrixMarket: bad size line");
        if (rows < 1 || cols < 1) throw ValidationError("MatrixMarket: dimensions must be >= 1");
        Matrixd a(rows, cols);
        // column-major value order
        for (long j = 0; j < cols; ++j) {
            for (long i = 0; i < rows; ++i) {
                if (!next_data_line()) throw IoError("MatrixMarket: truncated array data");
                std::istringstream vs(line);
                if (!(vs >> a(i, j))) throw IoError("MatrixMarket: bad array value");
            }
        }
        return a;
    }
    if (format == "coordinate") {
        long rows, cols, nnz;
        std::istringstream sz(line);
        if (!(sz >> rows >> cols >> nnz)) throw IoError("MatrixMarket: bad size line");
        if (rows < 1 || cols < 1) throw ValidationError("MatrixMarket: dimensions must be >= 1");
        Matrixd a = Matrixd::Zero(rows, cols);
        for (long k = 0; k < nnz; ++k) {
            if (!next_data_line()) throw IoError("MatrixMarket: truncated coordinate data");
            std::istringstream vs(line);
            long i, j;
            double v;
            if (!(vs >> i >> j >> v)) throw IoError("MatrixMarket: bad coordinate entry");
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw IoError("MatrixMarket: coordinate out of range");
            a(i - 1, j - 1) = v;
        }
        return a;
    }
    throw IoError("MatrixMarket: unsupported format '" + format + "'");
}

inline Matrixd read_csv_stream(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        std::vector<double> row;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError("CSV: cannot parse value '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("CSV: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("CSV: no data rows");
    Matrixd a(Index(rows.size()), Index(rows.front().size()));
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) a(i, j) = rows[size_t(i)][size_t(j)];
    return a;
}

}  // namespace detail

inline Matrixd read_matrix(const std::string& path, MatrixFormat format = MatrixFormat::kAuto) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    if (format == MatrixFormat::kAuto) {
        const auto dot = path.find_last_of('.');
        const std::string ext = dot == std::string::npos ? "" : detail::lower(path.substr(dot + 1));
        if (ext == "mtx" || ext == "mm")
            format = MatrixFormat::kMatrixMarket;
        else if (ext == "csv")
            format = MatrixFormat::kCsv;
        else {
            format = in.peek() == '%' ? MatrixFormat::kMatrixMarket : MatrixFormat::kCsv;
        }
    }
    Matrixd a = format == MatrixFormat::kMatrixMarket ? detail::read_matrix_market_stream(in)
                                                      : detail::read_csv_stream(in);
    check_matrix(a, path.c_str());
    return a;
}

inline void write_matrix_market(const std::string& path, const Matrixd& a) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "%%MatrixMarket matrix array real general\n";
    out << a.rows() << ' ' << a.cols() << '\n';
    char buf[64];
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g\n", a(i, j));
            out << buf;
        }
    if (!out) throw IoError("failed writing '" + path + "'");
}

// One value per line at 17 significant digits, then a '# sum=' trailer for
// the sum-equals-d check.
inline void write_weights(const std::string& path, const Vectord& w) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    char buf[64];
    for (Index i = 0; i < w.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", w[i]);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "# sum=%.17g\n", double(w.sum()));
    out << buf;
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline Vectord read_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        try {
            vals.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw IoError("weights file: cannot parse line '" + line + "'");
        }
    }
    if (vals.empty()) throw IoError("weights file '" + path + "' has no values");
    Vectord w(Index(vals.size()));
    for (Index i = 0; i < w.size(); ++i) w[i] = vals[size_t(i)];
    return w;
}

}  // namespace lewisrows
