#include "cdslab/measures.hpp"

#include <algorithm>
#include <cmath>

#include "cdslab/error.hpp"

namespace cdslab {

double trace_norm(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DomainError("trace norm needs a square matrix");
    }
    if (!m.allFinite()) {
        throw DomainError("trace norm of a matrix with non-finite entries");
    }
    if (m.size() == 0) return 0.0;
    if (is_hermitian(m, 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff()))) {
        return hermitian_eig(m).values.cwiseAbs().sum();
    }
    return singular_value_sum(m);
}

double fidelity(const Matrix& rho, const Matrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw LayoutError("fidelity of states with different dimensions");
    }
    const double f = std::pow(singular_value_sum(psd_sqrt(rho) * psd_sqrt(sigma)), 2);
    return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.layout().total_dim() != sigma.layout().total_dim()) {
        throw LayoutError("fidelity of states on " + to_string(rho.layout()) + " and " + to_string(sigma.layout()));
    }
    return fidelity(rho.matrix(), sigma.matrix());
}

double fidelity_with_pure(const Vector& psi, const Matrix& rho) {
    return std::clamp(std::abs(psi.dot(rho * psi)), 0.0, 1.0);
}

DiamondBounds diamond_distance_bounds(const QuantumChannel& n, const QuantumChannel& m) {
    if (n.input_dim() != m.input_dim() || n.output_dim() != m.output_dim()) {
        throw LayoutError("diamond distance between channels with different shapes");
    }
    const double lower = trace_norm(choi_state(n).matrix() - choi_state(m).matrix());
    return {lower, std::min(2.0, static_cast<double>(n.input_dim()) * lower)};
}

EnsembleCheck ensemble_sqrt_fidelity_check(const std::vector<std::pair<double, DensityMatrix>>& ensemble,
                                           const std::vector<DensityMatrix>& candidates) {
    if (ensemble.empty()) {
        throw DomainError("ensemble is empty");
    }
    double total = 0.0;
    for (const auto& [p, rho] : ensemble) {
        if (p < 0.0) throw DomainError("negative ensemble probability");
        total += p;
    }
    if (std::abs(total - 1.0) > tol::invariant) {
        throw DomainError("ensemble probabilities sum to " + std::to_string(total));
    }
    EnsembleCheck out;
    double acc = 0.0;
    for (const auto& [pi, ri] : ensemble) {
        for (const auto& [pj, rj] : ensemble) {
            acc += pi * pj * std::sqrt(fidelity(ri, rj));
        }
    }
    out.rhs = std::sqrt(acc);
    for (const auto& sigma : candidates) {
        double lhs = 0.0;
        for (const auto& [p, rho] : ensemble) {
            lhs += p * std::sqrt(fidelity(sigma, rho));
        }
        out.max_lhs = std::max(out.max_lhs, lhs);
    }
    return out;
}

}  // namespace cdslab
