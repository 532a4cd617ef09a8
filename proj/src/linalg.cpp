#include "cdslab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "cdslab/error.hpp"

namespace cdslab {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

HermitianEig hermitian_eig(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DomainError("eigendecomposition needs a square matrix");
    }
    const Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw DomainError("Hermitian eigendecomposition failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix psd_sqrt(const Matrix& m) {
    auto e = hermitian_eig(m);
    RealVector s = e.values.unaryExpr([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
    return e.vectors * s.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

Matrix psd_pinv_sqrt(const Matrix& m, double cutoff) {
    auto e = hermitian_eig(m);
    RealVector s = e.values.unaryExpr([&](double v) { return v > cutoff ? 1.0 / std::sqrt(v) : 0.0; });
    return e.vectors * s.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

double singular_value_sum(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

Matrix reorder(const Matrix& m, const Layout& layout, const std::vector<std::string>& order) {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    if (m.rows() != d || m.cols() != d) {
        throw LayoutError("operator shape does not match layout " + to_string(layout));
    }
    const auto idx = reorder_indices(layout, order);
    Matrix out(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            out(i, j) = m(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
        }
    }
    return out;
}

Vector reorder(const Vector& v, const Layout& layout, const std::vector<std::string>& order) {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    if (v.size() != d) {
        throw LayoutError("vector length does not match layout " + to_string(layout));
    }
    const auto idx = reorder_indices(layout, order);
    Vector out(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        out(i) = v(static_cast<Eigen::Index>(idx[i]));
    }
    return out;
}

namespace {

std::vector<std::string> keep_then_rest(const Layout& layout, const std::vector<std::string>& keep) {
    std::vector<std::string> order = layout.select(keep).names();
    for (const auto& n : layout.without(keep).names()) {
        order.push_back(n);
    }
    return order;
}

}  // namespace

Matrix trace_out(const Matrix& m, const Layout& layout, const std::vector<std::string>& keep) {
    if (keep.empty()) {
        throw LayoutError("partial trace needs a nonempty keep set");
    }
    // Keep subsystems in the order they appear in the layout.
    std::vector<std::string> ordered_keep;
    for (const auto& n : layout.names()) {
        if (std::find(keep.begin(), keep.end(), n) != keep.end()) ordered_keep.push_back(n);
    }
    if (ordered_keep.size() != keep.size()) {
        for (const auto& n : keep) (void)layout.index_of(n);
        throw LayoutError("partial trace keep set names a subsystem twice");
    }
    const Matrix r = reorder(m, layout, keep_then_rest(layout, ordered_keep));
    const auto k = static_cast<Eigen::Index>(layout.select(ordered_keep).total_dim());
    const Eigen::Index t = r.rows() / k;
    Matrix out = Matrix::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            cplx acc = 0.0;
            for (Eigen::Index a = 0; a < t; ++a) {
                acc += r(i * t + a, j * t + a);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix reduced_from_vector(const Vector& v, const Layout& layout, const std::vector<std::string>& keep) {
    std::vector<std::string> ordered_keep;
    for (const auto& n : layout.names()) {
        if (std::find(keep.begin(), keep.end(), n) != keep.end()) ordered_keep.push_back(n);
    }
    if (ordered_keep.empty() || ordered_keep.size() != keep.size()) {
        throw LayoutError("reduced state needs distinct, existing subsystems");
    }
    const Vector r = reorder(v, layout, keep_then_rest(layout, ordered_keep));
    const auto k = static_cast<Eigen::Index>(layout.select(ordered_keep).total_dim());
    const Eigen::Index t = r.size() / k;
    // Row-major reshape: psi(i, a) = r(i * t + a).
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(r.data(), k, t);
    return psi * psi.adjoint();
}

Matrix column_space(const Matrix& m, double cutoff) {
    if (m.cols() == 0) return Matrix(m.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cutoff) ++rank;
    return svd.matrixU().leftCols(rank);
}

}  // namespace cdslab
