#include "cdslab/states.hpp"

#include <cmath>

#include "cdslab/error.hpp"

namespace cdslab {

namespace {

void check_size(Eigen::Index n, const Layout& layout, const char* what) {
    if (static_cast<std::size_t>(n) != layout.total_dim()) {
        throw LayoutError(std::string(what) + " of size " + std::to_string(n) + " does not match layout " +
                          to_string(layout));
    }
}

}  // namespace

StateVector::StateVector() : amps_(Vector::Ones(1)) {}

StateVector::StateVector(Vector amplitudes, Layout layout) : amps_(std::move(amplitudes)), layout_(std::move(layout)) {
    check_size(amps_.size(), layout_, "state vector");
    if (!amps_.allFinite()) {
        throw DomainError("state vector has non-finite amplitudes");
    }
    if (std::abs(amps_.norm() - 1.0) > tol::invariant) {
        throw DomainError("state vector norm is " + std::to_string(amps_.norm()));
    }
}

StateVector StateVector::basis(const Layout& layout, std::size_t index) {
    if (index >= layout.total_dim()) {
        throw DomainError("basis index out of range");
    }
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(v), layout);
}

StateVector StateVector::normalized(Vector v, Layout layout) {
    const double n = v.norm();
    if (!(n > 0.0)) {
        throw DomainError("cannot normalize a zero vector");
    }
    v /= n;
    return StateVector(std::move(v), std::move(layout));
}

bool is_hermitian(const Matrix& m, double tolerance) {
    return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

double min_eigenvalue(const Matrix& m) { return hermitian_eig(m).values(0); }

DensityMatrix::DensityMatrix(Matrix entries, Layout layout, Unchecked)
    : m_(std::move(entries)), layout_(std::move(layout)) {
    if (m_.rows() != m_.cols()) {
        throw LayoutError("density matrix must be square");
    }
    check_size(m_.rows(), layout_, "density matrix");
    if (!m_.allFinite()) {
        throw DomainError("density matrix has non-finite entries");
    }
}

DensityMatrix::DensityMatrix(Matrix entries, Layout layout)
    : DensityMatrix(std::move(entries), std::move(layout), Unchecked{}) {
    if (!is_hermitian(m_)) {
        throw DomainError("density matrix is not Hermitian");
    }
    if (std::abs(m_.trace().real() - 1.0) > tol::invariant) {
        throw DomainError("density matrix trace is " + std::to_string(m_.trace().real()));
    }
    const double lo = min_eigenvalue(m_);
    if (lo < -tol::invariant) {
        throw DomainError("density matrix has eigenvalue " + std::to_string(lo));
    }
}

DensityMatrix DensityMatrix::assume_valid(Matrix entries, Layout layout) {
    return DensityMatrix(std::move(entries), std::move(layout), Unchecked{});
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.layout(), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(const Layout& layout) {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d), layout, Unchecked{});
}

DensityMatrix DensityMatrix::relabeled(const Layout& layout) const {
    if (layout.size() != layout_.size()) {
        throw LayoutError("relabeling must keep the number of subsystems");
    }
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (layout[i].dim != layout_[i].dim) {
            throw LayoutError("relabeling must keep subsystem dimensions");
        }
    }
    return DensityMatrix(m_, layout, Unchecked{});
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    Layout l = a.layout().concat(b.layout());
    return StateVector(kron(a.amplitudes(), b.amplitudes()), std::move(l));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    Layout l = a.layout().concat(b.layout());
    return DensityMatrix::assume_valid(kron(a.matrix(), b.matrix()), std::move(l));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
    if (keep.empty()) {
        throw LayoutError("partial trace keep set is empty");
    }
    Matrix r = trace_out(rho.matrix(), rho.layout(), keep);
    Layout l;
    {
        std::vector<Subsystem> parts;
        for (const auto& s : rho.layout()) {
            for (const auto& k : keep) {
                if (k == s.name) parts.push_back(s);
            }
        }
        l = Layout(std::move(parts));
    }
    return DensityMatrix::assume_valid(std::move(r), std::move(l));
}

DensityMatrix partial_trace(const StateVector& psi, const std::vector<std::string>& keep) {
    if (keep.empty()) {
        throw LayoutError("partial trace keep set is empty");
    }
    Matrix r = reduced_from_vector(psi.amplitudes(), psi.layout(), keep);
    std::vector<Subsystem> parts;
    for (const auto& s : psi.layout()) {
        for (const auto& k : keep) {
            if (k == s.name) parts.push_back(s);
        }
    }
    return DensityMatrix::assume_valid(std::move(r), Layout(std::move(parts)));
}

StateVector maximally_entangled(const std::string& a, const std::string& b, std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    Vector v = Vector::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i * n + i) = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return StateVector(std::move(v), Layout{{a, d}, {b, d}});
}

namespace {

Layout permuted(const Layout& l, const std::vector<std::string>& order) {
    if (order.size() != l.size()) {
        throw LayoutError("reordering must name every subsystem once");
    }
    return l.select(order);
}

}  // namespace

DensityMatrix reordered(const DensityMatrix& rho, const std::vector<std::string>& order) {
    Layout l = permuted(rho.layout(), order);
    return DensityMatrix::assume_valid(reorder(rho.matrix(), rho.layout(), order), std::move(l));
}

StateVector reordered(const StateVector& psi, const std::vector<std::string>& order) {
    Layout l = permuted(psi.layout(), order);
    return StateVector(reorder(psi.amplitudes(), psi.layout(), order), std::move(l));
}

}  // namespace cdslab
