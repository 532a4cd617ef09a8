#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdslab/layout.hpp"

namespace cdslab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
/// Validity checks on states, channels and isometries.
inline constexpr double invariant = 1e-9;
/// Exact algebraic identities.
inline constexpr double identity = 1e-12;
/// Eigenvalues down to this are treated as round-off and clamped to zero.
inline constexpr double psd_clamp = -1e-12;
}  // namespace tol

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

struct HermitianEig {
    RealVector values;  // ascending
    Matrix vectors;     // columns
};

/// Eigendecomposition of the Hermitian part of `m`.
HermitianEig hermitian_eig(const Matrix& m);

/// Square root of a PSD matrix; negative eigenvalues are clamped to zero.
Matrix psd_sqrt(const Matrix& m);

/// Moore-Penrose inverse square root on the support (eigenvalues > cutoff).
Matrix psd_pinv_sqrt(const Matrix& m, double cutoff = 1e-12);

/// Sum of singular values.
double singular_value_sum(const Matrix& m);

bool all_finite(const Matrix& m);

/// Reorder the tensor factors of a square operator on `layout`.
Matrix reorder(const Matrix& m, const Layout& layout, const std::vector<std::string>& order);
Vector reorder(const Vector& v, const Layout& layout, const std::vector<std::string>& order);

/// Partial trace of a square operator, keeping `keep` in layout order.
Matrix trace_out(const Matrix& m, const Layout& layout, const std::vector<std::string>& keep);

/// Reduced operator on `keep` of the pure state |v><v|, computed without
/// forming the full outer product.
Matrix reduced_from_vector(const Vector& v, const Layout& layout, const std::vector<std::string>& keep);

/// Orthonormal basis of the column span of `m`, for singular values above cutoff.
Matrix column_space(const Matrix& m, double cutoff = 1e-10);

}  // namespace cdslab
