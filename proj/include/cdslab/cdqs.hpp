#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cdslab/cds.hpp"
#include "cdslab/channel.hpp"
#include "cdslab/states.hpp"

namespace cdslab {

/// CDS with quantum resources. Alice's channel acts on the secret together
/// with her part of the resource; Bob's acts on his part. The message system
/// M is Alice's output followed by Bob's.
struct CdqsProtocol {
    std::string name;
    /// Named construction and parameters, for reports.
    std::string construction;
    int nx = 0;
    int ny = 0;
    Layout secret;
    StateVector resource;
    std::vector<std::string> alice_resource;
    Layout alice_output;
    Layout bob_output;
    std::function<QuantumChannel(u64 x)> alice;
    std::function<QuantumChannel(u64 y)> bob;
    std::function<std::optional<QuantumChannel>(u64 x, u64 y)> decoder;
    /// Message subsystems that only ever carry classical data.
    std::vector<std::string> classical_registers;
    /// Resource subsystems that are measured in a fixed basis before use,
    /// i.e. act as shared randomness rather than entanglement.
    std::vector<std::string> randomness_registers;
    /// For a parallel repetition, the relabeled copies.
    std::vector<CdqsProtocol> components;

    std::size_t d_q() const { return secret.total_dim(); }
    Layout message_layout() const { return alice_output.concat(bob_output); }
    std::vector<std::string> bob_resource() const;
};

inline constexpr std::size_t kRepeatBudget = 4096;
inline constexpr const char* kReferenceName = "Qbar";

/// The map N^{x,y} from the secret to M. Its Kraus operators are
/// (A_j (x) B_k)(I (x) |Psi>), reduced to the Choi rank.
QuantumChannel effective_channel(const CdqsProtocol& p, u64 x, u64 y);

/// Output state on M for the given secret state.
DensityMatrix run_cdqs(const CdqsProtocol& p, u64 x, u64 y, const DensityMatrix& secret);

/// (id (x) N^{x,y})(Phi+) on (Qbar, M).
DensityMatrix mid_protocol_state(const CdqsProtocol& p, u64 x, u64 y);

/// k independent copies on k-fold secrets; subsystem names get "#i".
/// Throws BudgetError if d_Q^k d_M^k exceeds kRepeatBudget.
CdqsProtocol parallel_repeat(const CdqsProtocol& p, int k);

/// Every subsystem name suffixed; channels wrapped accordingly.
CdqsProtocol relabel_protocol(const CdqsProtocol& p, const std::string& suffix);

/// Quantum one-time pad driven by a classical CDS with 4 secret values:
/// Alice draws a key k, applies X^{k_0} Z^{k_1} to Q, sends it with the CDS
/// message for secret k; the decoder recovers k and undoes the pad. The
/// shared randomness is held as basis-measured resource registers L and R.
CdqsProtocol classical_to_quantum_lift(const CdsProtocol& key_cds);

/// Alice forwards Q; nobody holds a resource.
CdqsProtocol forwarding_cdqs();

/// AND on one-bit inputs with a 2-bit shared key: Alice sends the padded Q
/// if x=1 and a maximally mixed qubit otherwise; Bob sends the key if y=1
/// and 00 otherwise.
CdqsProtocol and_key_cdqs();

/// Secret passes through `noise` (a channel on the secret) before Alice acts.
CdqsProtocol with_secret_noise(const CdqsProtocol& p, const QuantumChannel& noise, const std::string& tag);

/// AND-key protocol whose x=0 branch sends Q in the clear with probability `leak`.
CdqsProtocol leaky_and_key_cdqs(double leak);

CostReport protocol_cost(const CdqsProtocol& p);

/// X^{k_0} Z^{k_1} on a qubit.
Matrix pauli_pad(u64 k);

}  // namespace cdslab
