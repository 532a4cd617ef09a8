#pragma once

#include <string>
#include <vector>

#include "cdslab/layout.hpp"
#include "cdslab/linalg.hpp"

namespace cdslab {

class StateVector {
public:
    /// The one-dimensional state on an empty layout.
    StateVector();
    /// Throws LayoutError on a size mismatch and DomainError if not normalized.
    StateVector(Vector amplitudes, Layout layout);

    static StateVector basis(const Layout& layout, std::size_t index);
    /// Renormalizes `v`; throws DomainError if it is zero.
    static StateVector normalized(Vector v, Layout layout);

    const Vector& amplitudes() const { return amps_; }
    const Layout& layout() const { return layout_; }
    std::size_t dim() const { return layout_.total_dim(); }

private:
    Vector amps_;
    Layout layout_;
};

class DensityMatrix {
public:
    /// Checks Hermiticity, unit trace and positivity within tol::invariant.
    DensityMatrix(Matrix entries, Layout layout);

    /// Skips the eigenvalue check; for states produced by channels from
    /// valid states, where the check would dominate the run time.
    static DensityMatrix assume_valid(Matrix entries, Layout layout);
    static DensityMatrix pure(const StateVector& psi);
    static DensityMatrix maximally_mixed(const Layout& layout);

    const Matrix& matrix() const { return m_; }
    const Layout& layout() const { return layout_; }
    std::size_t dim() const { return layout_.total_dim(); }

    /// Same entries, subsystems renamed in order.
    DensityMatrix relabeled(const Layout& layout) const;

private:
    struct Unchecked {};
    DensityMatrix(Matrix entries, Layout layout, Unchecked);

    Matrix m_;
    Layout layout_;
};

StateVector tensor(const StateVector& a, const StateVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Reduced state on `keep`, in layout order. Throws LayoutError if `keep` is
/// empty or names an unknown subsystem.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);
DensityMatrix partial_trace(const StateVector& psi, const std::vector<std::string>& keep);

/// sum_i |ii>/sqrt(d) on (a, b).
StateVector maximally_entangled(const std::string& a, const std::string& b, std::size_t d);

/// Reorders the subsystems of a state; `order` must be a permutation of its names.
DensityMatrix reordered(const DensityMatrix& rho, const std::vector<std::string>& order);
StateVector reordered(const StateVector& psi, const std::vector<std::string>& order);

/// Checks used by DensityMatrix; exposed for matrices that are not states.
bool is_hermitian(const Matrix& m, double tolerance = tol::invariant);
double min_eigenvalue(const Matrix& m);

}  // namespace cdslab
