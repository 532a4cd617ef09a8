#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdslab/cdqs.hpp"
#include "cdslab/cds.hpp"
#include "cdslab/promise.hpp"

namespace cdslab {

inline constexpr double kDefaultEpsilonBudget = 0.09;
inline constexpr double kDefaultDeltaBudget = 0.09;

/// Per-input diagnostics. For value-one inputs `correctness` is the decode
/// error (classical: failure probability maximized over secrets; quantum: the
/// Choi-based lower bound) and `correctness_upper` its d_Q-scaled bound. For
/// value-zero inputs `security` is the distance to the simulator.
struct InputDiagnostic {
    u64 x = 0;
    u64 y = 0;
    FValue value = FValue::outside;
    double correctness = 0.0;
    double correctness_upper = 0.0;
    double security = 0.0;
    double security_upper = 0.0;
    /// Quantum value-zero inputs with d_Q <= 4 on qubits: largest distance
    /// between N(psi) and rho_M over products of Pauli eigenstates. These span
    /// the operator space, so zero certifies that N is constant.
    std::optional<double> pauli_spread;
};

struct VerificationReport {
    std::string protocol;
    std::string kind;
    std::string function;
    int n = 0;
    bool exhaustive = true;
    double epsilon_hat = 0.0;
    double epsilon_upper = 0.0;
    double delta_hat_lower = 0.0;
    double delta_hat_upper = 0.0;
    std::vector<InputDiagnostic> inputs;
    CostReport cost;
    std::vector<std::string> notes;
    u64 seed = 0;
    std::optional<double> wall_time_ms;

    bool passes(double epsilon = kDefaultEpsilonBudget, double delta = kDefaultDeltaBudget) const {
        return epsilon_hat <= epsilon && delta_hat_upper <= delta;
    }
};

struct VerifyOptions {
    int workers = 1;
    /// Solve the simulator LP even when two distributions admit the midpoint.
    bool force_lp = false;
};

/// Exact decode failure and optimal-simulator radius by enumeration.
VerificationReport cds_verify(const CdsProtocol& p, const PromiseFunction& f, const VerifyOptions& opt = {});
/// As cds_verify with one simulator per function value.
VerificationReport psm_verify(const PsmProtocol& p, const PromiseFunction& f, const VerifyOptions& opt = {});
/// Correctness with the shipped decoder and security against the constant
/// simulator rho_M, both evaluated on the maximally entangled secret.
VerificationReport cdqs_verify(const CdqsProtocol& p, const PromiseFunction& f, const VerifyOptions& opt = {});

struct ProductnessEntry {
    u64 x = 0;
    u64 y = 0;
    FValue value = FValue::outside;
    /// ||rho_{Qbar M} - pi (x) rho_M||_1.
    double product_distance = 0.0;
    /// <Phi+|(D (x) I)(rho_{Qbar M})|Phi+>, value-one inputs only.
    std::optional<double> entanglement_fidelity;
};

std::vector<ProductnessEntry> productness_check(const CdqsProtocol& p, const PromiseFunction& f,
                                                const VerifyOptions& opt = {});

/// 2(1 - 1/sqrt(d_Q)) - epsilon: every product state is at least this far
/// from the mid-protocol state of an epsilon-correct protocol on a value-one input.
double entangled_separation_bound(std::size_t d_q, double epsilon);

struct ChebyshevCenter {
    double radius = 0.0;
    /// Distribution over the union of supports, in the column order given.
    std::vector<double> center;
    /// ||center - row_i||_1 for each input row.
    std::vector<double> distances;
};

/// Distribution minimizing the largest L1 distance to the rows (exact
/// integer counts over a common denominator). Two distinct rows use the
/// midpoint unless `force_lp`.
ChebyshevCenter l1_chebyshev_center(const std::vector<std::vector<u64>>& counts, u64 denominator,
                                    bool force_lp = false);

/// Trace norm, summed block by block when the operator is block diagonal
/// in the basis of the listed registers (checked, otherwise the full norm).
double blockwise_trace_norm(const Matrix& m, const Layout& layout, const std::vector<std::string>& classical);

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace cdslab
