#pragma once

#include "opcor/dense.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace opcor {

// Raised by readers when a file does not match its declared schema.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// 17 significant digits round-trips any IEEE-754 double exactly.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// All writers are atomic: the content lands in a sibling temp file which is
// renamed over the destination only once fully written.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

// Matrix text format: first line "rows cols", then `rows` lines of `cols`
// space-separated values printed with 17 significant digits.
inline void save_matrix(const std::filesystem::path& path, const Matrix& m) {
    require(m.size() > 0, "save_matrix: empty matrix");
    require(m.allFinite(), "save_matrix: non-finite entries");
    std::string out;
    out.reserve(static_cast<size_t>(m.size()) * 25 + 32);
    out += std::to_string(m.rows());
    out += ' ';
    out += std::to_string(m.cols());
    out += '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ' ';
            out += detail::format_double(m(i, j));
        }
        out += '\n';
    }
    detail::atomic_write(path, out);
}

inline Matrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("matrix file not readable: " + path.string());
    long long rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows <= 0 || cols <= 0)
        throw ValidationError("matrix file " + path.string() + ": bad header (want \"rows cols\")");
    Matrix m(rows, cols);
    for (long long i = 0; i < rows; ++i) {
        for (long long j = 0; j < cols; ++j) {
            double v = 0.0;
            if (!(in >> v))
                throw ValidationError("matrix file " + path.string() + ": truncated at entry (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")");
            if (!std::isfinite(v))
                throw ValidationError("matrix file " + path.string() + ": non-finite entry at (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")");
            m(i, j) = v;
        }
    }
    std::string extra;
    if (in >> extra)
        throw ValidationError("matrix file " + path.string() + ": trailing data after last entry");
    return m;
}

}  // namespace opcor
