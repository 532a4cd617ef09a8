#pragma once

#include <utility>
#include <vector>

#include "cdslab/channel.hpp"
#include "cdslab/linalg.hpp"
#include "cdslab/states.hpp"

namespace cdslab {

/// Sum of singular values (no 1/2 factor). Throws DomainError on a
/// non-square or non-finite matrix.
double trace_norm(const Matrix& m);

/// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0,1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double fidelity(const Matrix& rho, const Matrix& sigma);

/// |<psi|rho|psi>| for a pure state, without the matrix square roots.
double fidelity_with_pure(const Vector& psi, const Matrix& rho);

struct DiamondBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// lower = ||J(n) - J(m)||_1 with normalized Choi states (the maximally
/// entangled input); upper = min(2, input_dim * lower).
DiamondBounds diamond_distance_bounds(const QuantumChannel& n, const QuantumChannel& m);

struct EnsembleCheck {
    double max_lhs = 0.0;
    double rhs = 0.0;
};

/// max over candidates sigma of sum_i p_i sqrt(F(sigma, rho_i)), against
/// sqrt(sum_ij p_i p_j sqrt(F(rho_i, rho_j))).
EnsembleCheck ensemble_sqrt_fidelity_check(const std::vector<std::pair<double, DensityMatrix>>& ensemble,
                                           const std::vector<DensityMatrix>& candidates);

}  // namespace cdslab
