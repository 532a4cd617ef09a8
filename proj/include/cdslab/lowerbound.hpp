#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdslab/cdqs.hpp"
#include "cdslab/promise.hpp"
#include "cdslab/verifier.hpp"

namespace cdslab {

/// 1/2 (1 - 1/sqrt(d_Q)) - epsilon/4 - delta/4. Throws DomainError unless
/// positive, or if epsilon, delta lie outside [0,1) or d_Q < 2.
double gamma_threshold(double epsilon, double delta, std::size_t d_q);

/// ceil(3/2 (q_B + E) - log2 gamma). Throws DomainError if gamma <= 0.
int required_digits(double q_b, double e, double gamma);

/// Entries rounded per real component to the nearest multiple of 2^-k,
/// stored as integers scaled by 2^k.
struct QuantizedState {
    int digits = 0;
    Layout layout;
    std::vector<std::int64_t> re;
    std::vector<std::int64_t> im;

    std::size_t dim() const { return layout.total_dim(); }
    Matrix matrix() const;
};

struct QuantizationReport {
    QuantizedState state;
    double max_component_error = 0.0;
    double frobenius_error = 0.0;
    double trace_error = 0.0;
    /// d / 2^k and d^{3/2} / 2^k.
    double frobenius_bound = 0.0;
    double trace_bound = 0.0;
    /// component error < 2^-k, ||.||_1 <= sqrt(d) ||.||_2 <= d^{3/2}/2^k.
    bool chain_holds = false;
};

/// Throws DomainError for k outside [1, 52].
QuantizationReport quantize_state(const DensityMatrix& rho, int k);

/// rho_{L M_B}(y): Bob's channel applied to the resource, Alice's resource kept.
DensityMatrix bob_side_state(const CdqsProtocol& p, u64 y);

struct OneWayDecision {
    int value = 0;
    int digits = 0;
    double gamma = 0.0;
    /// Midpoint between delta and 2(1 - 1/sqrt(d_Q)) - epsilon.
    double threshold = 0.0;
    /// ||rho^_{Qbar M} - pi (x) rho^_M||_1 from the quantized description.
    double distance = 0.0;
    /// The same distance from the exact state.
    double exact_distance = 0.0;
    QuantizationReport quantization;
};

struct OneWayParameters {
    double epsilon = 0.0;
    double delta = 0.0;
    int digits = 0;
};

/// Digits from required_digits(log2 d_{M_B}, log2 d_L, gamma(epsilon, delta, d_Q)).
OneWayParameters one_way_parameters(const CdqsProtocol& p, double epsilon, double delta);

/// Bob sends rho_{L M_B}(y) to k digits; Alice applies her channel to it with
/// Q maximally entangled to Qbar and compares the distance to product with
/// the threshold. Throws DomainError if gamma <= 0 or k is below the
/// required digit count.
OneWayDecision one_way_decide(const CdqsProtocol& p, u64 x, u64 y, const OneWayParameters& params);

/// Two-prover proof built from k parallel copies of a CDQS protocol. The
/// copies are independent, so states and fidelities are computed per copy
/// and combined as tensor products.
struct TwoProverProof {
    CdqsProtocol source;
    int k = 1;
    /// Secret qubits n_Q of the repeated protocol.
    int secret_qubits = 0;
    std::string verifier_test;
};

/// Throws BudgetError for k > 8.
TwoProverProof build_two_prover_proof(const CdqsProtocol& p, int k);

/// Per-copy Stinespring data for one input.
struct CopyPurification {
    Isometry alice;
    Isometry bob;
    /// psi^s on (M, M') for each secret basis state s, as d_M x d_M' matrices.
    std::vector<Matrix> psi;
    Layout m_layout;
    Layout m_prime_layout;
    std::size_t d_ma = 0, d_ma_prime = 0, d_mb = 0, d_mb_prime = 0, d_q = 0, d_l = 0, d_r = 0;
};

CopyPurification purify_copy(const TwoProverProof& tp, u64 x, u64 y);

struct ProofCost {
    /// k (log d_{M_A} d_{M_A'} d_{M_B} d_{M_B'} + log d_R).
    double communication = 0.0;
    /// k (2 log d_{M_A} + 2 log d_{M_B} + log d_Q + log d_L + 2 log d_R), from
    /// d_{M_A'} <= d_Q d_L d_{M_A} and d_{M_B'} <= d_R d_{M_B}.
    double chain = 0.0;
    /// 2 k (2E + q_A + q_B) + n_Q.
    double bound = 0.0;
    bool environment_bounds_hold = false;
};

ProofCost proof_cost(const TwoProverProof& tp, u64 x, u64 y);

struct HonestAcceptance {
    /// Averaged over the uniform secret.
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Provers hold phi_{PM'} obtained by running the protocol forward on the
/// entangled secret and applying the decoder's Stinespring isometry; prover 1
/// applies its adjoint to (P, s). Throws DomainError unless f(x,y) = 1.
HonestAcceptance honest_acceptance(const TwoProverProof& tp, const PromiseFunction& f, u64 x, u64 y);

/// max over s != s' of F(psi^s_{M'}, psi^{s'}_{M'}). Throws DomainError unless f(x,y) = 0.
double message_orthogonality_check(const TwoProverProof& tp, const PromiseFunction& f, u64 x, u64 y);

struct CheatOptions {
    int max_rounds = 500;
    double min_improvement = 1e-10;
    /// Random starts for the single-copy search; the joint k-copy search uses
    /// the tensor power of the best single-copy strategy and one random start.
    int restarts = 3;
    std::uint64_t seed = 1;
};

struct CheatResult {
    /// Best p_pass found with prover 2's share fixed before s is drawn.
    double p_pass = 0.0;
    /// Best p_pass when the shared part may depend on s.
    double ablation_p_pass = 0.0;
    int rounds = 0;
    bool converged = false;
    /// Dimensions of the supports the search runs in.
    std::size_t m_support = 0;
    std::size_t m_prime_support = 0;
    /// True when the joint search exceeded the dense budget and the provers
    /// were restricted to independent per-copy strategies.
    bool product_restricted = false;
};

/// See-saw over prover strategies phi_{R M'} (prepared before s) and
/// isometries W_s: R -> M applied by prover 1 after seeing s. Searches the
/// joint k-copy space when it fits the dense budget, else per-copy strategies.
/// Throws DomainError unless f(x,y) = 0.
CheatResult cheat_optimize(const TwoProverProof& tp, const PromiseFunction& f, u64 x, u64 y,
                           const CheatOptions& options = {});

/// sqrt(2^-k + delta 2^{-k/4}).
double soundness_bound(int k, double delta);

/// sqrt(1/d_Q + 2 delta^{1/4}), the value the fidelity chain gives for a
/// protocol with secret dimension d_Q and security delta.
double fidelity_chain_bound(std::size_t d_q, double delta);

struct ComplementaryDecode {
    double achieved_error = 0.0;
    int rounds = 0;
    bool converged = false;
};

/// Best decoder from the complementary channel of N^{x,y} back to Q.
/// Throws DomainError unless f(x,y) = 0.
ComplementaryDecode complementary_decode_check(const CdqsProtocol& p, const PromiseFunction& f, u64 x, u64 y);

}  // namespace cdslab
