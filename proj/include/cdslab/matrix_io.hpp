#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cdslab/linalg.hpp"
#include "cdslab/states.hpp"

namespace cdslab {

/// Square operator on a tensor product of the listed dimensions.
struct DimMatrix {
    std::vector<std::size_t> dims;
    Matrix entries;
};

/// Writes "dims: d1 d2 ..." then one row per line of "re,im" pairs with 17
/// significant digits.
void write_matrix(std::ostream& os, const Matrix& m, const std::vector<std::size_t>& dims);
/// Throws FormatError with the offending line number.
DimMatrix read_matrix(std::istream& is);

void write_density(std::ostream& os, const DensityMatrix& rho);
/// Subsystems are named s0, s1, ...; validates the state.
DensityMatrix read_density(std::istream& is);

}  // namespace cdslab
