#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdslab/bits.hpp"
#include "cdslab/promise.hpp"

namespace cdslab {

struct CostReport {
    int communication_bits = 0;
    int communication_qubits = 0;
    int randomness_bits = 0;
    int entanglement_pairs = 0;

    friend bool operator==(const CostReport&, const CostReport&) = default;
};

using ShareVisitor = std::function<void(u64 alice_share, u64 bob_share, u64 weight)>;

/// Input-dependent correlation shared by Alice and Bob before they speak,
/// e.g. the outcomes of measuring shared EPR pairs after input-dependent
/// local operations. Weights are exact integers summing to `denominator`
/// for every input pair.
struct CorrelatedResource {
    std::string description;
    u64 denominator = 1;
    std::function<void(u64 x, u64 y, const ShareVisitor&)> visit;
    int randomness_bits = 0;
    int entanglement_pairs = 0;
};

/// Classical CDS. Without a correlated resource, both parties receive the
/// same uniformly random string r of `randomness_bits` bits.
struct CdsProtocol {
    std::string name;
    int nx = 0;
    int ny = 0;
    int randomness_bits = 0;
    u64 secret_alphabet = 2;
    int message_a_bits = 0;
    int message_b_bits = 0;
    std::function<u64(u64 x, u64 s, u64 r)> message_a;
    std::function<u64(u64 y, u64 r)> message_b;
    std::function<u64(u64 m_a, u64 x, u64 m_b, u64 y)> decode;
    std::optional<CorrelatedResource> correlated;
};

/// Classical PSM (or, with a correlated resource built from entanglement,
/// the classical part of a PSQM). The referee sees only the messages.
struct PsmProtocol {
    std::string name;
    int nx = 0;
    int ny = 0;
    int randomness_bits = 0;
    u64 output_alphabet = 2;
    int message_a_bits = 0;
    int message_b_bits = 0;
    std::function<u64(u64 x, u64 r)> message_a;
    std::function<u64(u64 y, u64 r)> message_b;
    std::function<u64(u64 m_a, u64 m_b)> decode;
    std::optional<CorrelatedResource> correlated;
};

/// Exact distribution over message pairs, keyed by (m_a << message_b_bits) | m_b
/// and sorted by key. Probability of an entry is count / denominator.
struct MessageDistribution {
    std::vector<std::pair<u64, u64>> entries;
    u64 denominator = 1;
    int message_b_bits = 0;

    u64 m_a(std::size_t i) const { return entries[i].first >> message_b_bits; }
    u64 m_b(std::size_t i) const { return entries[i].first & low_mask(message_b_bits); }
    u64 count_of(u64 m_a, u64 m_b) const;
    u64 total() const;
};

inline constexpr int kEnumerationBudgetBits = 24;

/// Throws BudgetError when more than 2^24 randomness values would be visited.
MessageDistribution enumerate_message_distribution(const CdsProtocol& p, u64 x, u64 y, u64 s);
MessageDistribution enumerate_message_distribution(const PsmProtocol& p, u64 x, u64 y);

/// Visits every (randomness, weight) outcome with the resulting messages.
void for_each_transcript(const CdsProtocol& p, u64 x, u64 y, u64 s,
                         const std::function<void(u64 m_a, u64 m_b, u64 weight)>& fn);
void for_each_transcript(const PsmProtocol& p, u64 x, u64 y,
                         const std::function<void(u64 m_a, u64 m_b, u64 weight)>& fn);

u64 transcript_denominator(const CdsProtocol& p);
u64 transcript_denominator(const PsmProtocol& p);

CostReport protocol_cost(const CdsProtocol& p);
CostReport protocol_cost(const PsmProtocol& p);

/// `copies` independent instances sharing the inputs; the secret is read as
/// `copies` digits base p.secret_alphabet, least significant digit first.
CdsProtocol parallel_extend(const CdsProtocol& p, int copies);

using PsmFamily = std::function<std::optional<PsmProtocol>(const PromiseFunction& h)>;

/// CDS for one-bit secrets from a PSM for h((x,s),y) = s AND [f(x,y)=1],
/// where Alice's PSM input is x | (s << f.nx). Throws DomainError when the
/// family has no protocol for h.
CdsProtocol psm_to_cds(const PsmFamily& family, const PromiseFunction& f);

/// The function h used by psm_to_cds.
PromiseFunction secret_gated_function(const PromiseFunction& f);

/// Perfect PSM for any Boolean function with ny <= 4: Bob sends a shifted
/// index and a mask bit, Alice sends the masked, shifted truth table row.
std::optional<PsmProtocol> table_psm(const PromiseFunction& h);

}  // namespace cdslab
