#include "cdslab/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "cdslab/error.hpp"

namespace cdslab {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

double parse_double(const std::string& s, int line) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw FormatError("line " + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

void write_matrix(std::ostream& os, const Matrix& m, const std::vector<std::size_t>& dims) {
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total) {
        throw LayoutError("matrix shape does not match the listed dimensions");
    }
    os << "dims:";
    for (auto d : dims) os << ' ' << d;
    os << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
        }
        os << '\n';
    }
}

DimMatrix read_matrix(std::istream& is) {
    std::string line;
    int lineno = 0;
    DimMatrix out;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    if (line.rfind("dims:", 0) != 0) {
        throw FormatError("line " + std::to_string(lineno) + ": expected 'dims:' header");
    }
    {
        std::istringstream hs(line.substr(5));
        std::string tok;
        while (hs >> tok) {
            const double d = parse_double(tok, lineno);
            if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d))) {
                throw FormatError("line " + std::to_string(lineno) + ": bad dimension '" + tok + "'");
            }
            out.dims.push_back(static_cast<std::size_t>(d));
        }
    }
    if (out.dims.empty()) {
        throw FormatError("line " + std::to_string(lineno) + ": no dimensions listed");
    }
    std::size_t total = 1;
    for (auto d : out.dims) total *= d;
    const auto n = static_cast<Eigen::Index>(total);
    out.entries.resize(n, n);
    Eigen::Index count = 0;
    while (count < n * n && std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            const auto comma = tok.find(',');
            if (comma == std::string::npos) {
                throw FormatError("line " + std::to_string(lineno) + ": expected re,im pair, got '" + tok + "'");
            }
            if (count >= n * n) {
                throw FormatError("line " + std::to_string(lineno) + ": too many entries");
            }
            out.entries(count / n, count % n) =
                cplx(parse_double(tok.substr(0, comma), lineno), parse_double(tok.substr(comma + 1), lineno));
            ++count;
        }
    }
    if (count != n * n) {
        throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(n * n) + " entries, got " +
                          std::to_string(count));
    }
    return out;
}

void write_density(std::ostream& os, const DensityMatrix& rho) {
    std::vector<std::size_t> dims;
    for (const auto& s : rho.layout()) dims.push_back(s.dim);
    write_matrix(os, rho.matrix(), dims);
}

DensityMatrix read_density(std::istream& is) {
    DimMatrix dm = read_matrix(is);
    std::vector<Subsystem> parts;
    for (std::size_t i = 0; i < dm.dims.size(); ++i) parts.push_back({"s" + std::to_string(i), dm.dims[i]});
    return DensityMatrix(std::move(dm.entries), Layout(std::move(parts)));
}

}  // namespace cdslab
