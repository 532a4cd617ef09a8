#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdslab/cdqs.hpp"
#include "cdslab/cds.hpp"

namespace cdslab {

/// One bit per entry; entry i is component i.
using BitString = std::vector<std::uint8_t>;

BitString bits_from_u64(u64 v, int n);

/// Outcome distribution of the shortening circuit: (a,b) has weight
/// S(a^b)^2 over n^3, where S(c) = sum_i (-1)^{x_i + y_i + i.c}.
struct DjDistribution {
    int log_n = 0;
    u64 denominator = 1;
    /// Weight of every pair (a,b) with a ^ b = c, indexed by c.
    std::vector<u64> weight_by_difference;

    u64 weight(u64 a, u64 b) const { return weight_by_difference[a ^ b]; }
    double probability(u64 a, u64 b) const;
    double probability_equal() const;
};

/// Throws DomainError unless n = |x| = |y| is a power of 2 (n >= 2, n <= 2^20).
DjDistribution dj_shorten(const BitString& x, const BitString& y);

/// Promise-NEQ with a classical secret: shortening to (a,b), then neq_cds on
/// (a,b). The referee does not know (a,b), so each party also sends its
/// shortened string. n a power of 2, 2 <= n <= 64.
CdsProtocol neq_promise_cds(int n);

/// The same protocol with a quantum secret: Alice pads Q with a 2-bit key and
/// two copies of neq_cds carry the key. Entanglement for the shortening is a
/// genuine resource register; only n = 2 fits the dense budget.
CdqsProtocol neq_promise_cdqs(int n);

/// Quantum one-time pad lifted from two copies of neq_cds(1).
CdqsProtocol lifted_neq_cdqs();

struct BhmInstance {
    int n = 0;
    /// 2n bits.
    u64 x = 0;
    std::vector<std::pair<int, int>> matching;
    /// n bits; bit k belongs to edge k.
    u64 w = 0;
    int promised_value = 0;
};

/// Bit k is x_i ^ x_j for the k-th edge (i,j).
u64 matching_parity(const BhmInstance& inst);

/// Throws DomainError if the matching is not perfect or the promise fails.
void validate_bhm_instance(const BhmInstance& inst);

/// 1 <= n, 2n <= 24. Hamming weight of Mx ^ w is `weight` when given,
/// otherwise uniform over the weights allowed by the promise.
BhmInstance bhm_instance(int n, int target_value, u64 seed, std::optional<int> weight = std::nullopt);

std::string format_bhm_instance(const BhmInstance& inst);
/// Throws FormatError on malformed text, DomainError on a broken promise.
BhmInstance parse_bhm_instance(const std::string& text);

struct BhmOutcome {
    u64 k = 0;
    u64 l = 0;
    int edge = 0;
    u64 weight = 0;
};

/// The BHM protocol: log(2n) shared EPR pairs (index space padded to a power
/// of 2), Alice injects (-1)^{x_i}, Bob measures the matching edges, both
/// apply Hadamards and measure; then ip_psm on ((k,1,1), (i^j, <l,i^j>, w_ij)).
struct BhmPsqm {
    int n = 0;
    int register_qubits = 0;
    u64 register_dim = 0;
    PsmProtocol inner;

    /// Outcomes with nonzero probability; weights over outcome_denominator().
    std::vector<BhmOutcome> outcomes(const BhmInstance& inst) const;
    u64 outcome_denominator() const { return static_cast<u64>(n) * register_dim * register_dim / 2; }

    u64 alice_inner_input(u64 k) const;
    u64 bob_inner_input(const BhmInstance& inst, u64 l, int edge) const;
    /// Referee's output for one outcome and inner randomness r.
    int vote(const BhmInstance& inst, const BhmOutcome& o, u64 r) const;
    /// Exact probability that the single-shot vote is 1.
    double probability_vote_one(const BhmInstance& inst) const;
    CostReport cost() const;
};

BhmPsqm bhm_psqm(int n);

/// Probability that the majority of t independent votes (t odd) is correct
/// when each is correct with probability p.
double majority_success(double p, int t);

}  // namespace cdslab
