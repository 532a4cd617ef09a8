#pragma once

#include "cdslab/channel.hpp"

namespace cdslab {

struct DecoderSearchOptions {
    int max_rounds = 500;
    double min_improvement = 1e-10;
};

struct DecoderResult {
    QuantumChannel decoder;
    /// Choi-state lower bound of ||decoder o n - target||_diamond.
    double achieved_error = 0.0;
    /// Normalized overlap tr(J_target J_{decoder o n}) / d_in^2; the
    /// entanglement fidelity when the target is unitary.
    double overlap = 0.0;
    int rounds = 0;
    bool converged = false;
};

/// Searches for a decoder D maximizing the Choi overlap of D o n with
/// `target` by the fixed-point iteration J <- Omega^{-1/2} J C J Omega^{-1/2}.
/// The decoder maps n's output layout to target's output layout.
DecoderResult find_best_decoder(const QuantumChannel& n, const QuantumChannel& target,
                                const DecoderSearchOptions& options = {});

}  // namespace cdslab
