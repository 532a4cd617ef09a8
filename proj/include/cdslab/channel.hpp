#pragma once

#include <string>
#include <vector>

#include "cdslab/layout.hpp"
#include "cdslab/linalg.hpp"
#include "cdslab/states.hpp"

namespace cdslab {

/// Linear map V with V^dagger V = I from `input` to `output`.
class Isometry {
public:
    Isometry(Matrix v, Layout input, Layout output);

    const Matrix& matrix() const { return v_; }
    const Layout& input_layout() const { return in_; }
    const Layout& output_layout() const { return out_; }

private:
    Matrix v_;
    Layout in_;
    Layout out_;
};

/// CPTP map in operator-sum form. Kraus operators are output_dim x input_dim.
class QuantumChannel {
public:
    QuantumChannel(std::vector<Matrix> kraus, Layout input, Layout output);

    static QuantumChannel identity(const Layout& layout);
    static QuantumChannel unitary(const Matrix& u, const Layout& layout);
    static QuantumChannel from_isometry(const Isometry& v);
    /// rho -> tr(rho) sigma.
    static QuantumChannel constant(const Layout& input, const DensityMatrix& sigma);
    /// rho -> (1-p) rho + p tr(rho) I/d.
    static QuantumChannel depolarizing(const Layout& layout, double p);
    /// Qubit (or qudit) dephasing in the computational basis with probability p.
    static QuantumChannel dephasing(const Layout& layout, double p);

    const std::vector<Matrix>& kraus() const { return kraus_; }
    const Layout& input_layout() const { return in_; }
    const Layout& output_layout() const { return out_; }
    std::size_t input_dim() const { return in_.total_dim(); }
    std::size_t output_dim() const { return out_.total_dim(); }

    /// Same operators, new subsystem names (dimensions must agree).
    QuantumChannel relabeled(const Layout& input, const Layout& output) const;

private:
    std::vector<Matrix> kraus_;
    Layout in_;
    Layout out_;
};

/// `second` after `first`; the output of `first` must equal the input of `second`.
QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first);

/// Channel on the concatenated layouts acting independently on each factor.
QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b);

/// Same map with the input (or output) subsystems listed in a new order.
QuantumChannel with_input_order(const QuantumChannel& n, const std::vector<std::string>& order);
QuantumChannel with_output_order(const QuantumChannel& n, const std::vector<std::string>& order);

/// Equivalent channel with the fewest Kraus operators (Choi rank).
QuantumChannel minimal_kraus(const QuantumChannel& n);

/// Applies `n` to the subsystems of `rho` named by its input layout, identity
/// on the rest. Output subsystems take the position of the first input
/// subsystem; the remaining subsystems keep their relative order.
DensityMatrix apply_channel(const QuantumChannel& n, const DensityMatrix& rho);

/// As apply_channel, on an arbitrary square matrix (no state checks).
Matrix apply_channel_to_operator(const QuantumChannel& n, const Matrix& m, const Layout& layout, Layout* out_layout);

/// Applies an isometry to the named subsystems of a pure state, with the same
/// placement rule as apply_channel.
StateVector apply_isometry(const Isometry& v, const StateVector& psi);

/// Stinespring dilation: output layout is the channel output followed by an
/// environment subsystem `env_name` of dimension equal to the Kraus count
/// after reduction to at most input_dim * output_dim operators.
Isometry purify_channel(const QuantumChannel& n, const std::string& env_name = "env");

/// Channel to the environment of the dilation defined by the Kraus
/// operators of `n`.
QuantumChannel complementary_channel(const QuantumChannel& n, const std::string& env_name = "env");

/// (n (x) id)(Phi+) with normalized Phi+; layout is the output followed by
/// the input names with a trailing apostrophe.
DensityMatrix choi_state(const QuantumChannel& n);

/// Channel with the given normalized Choi state (layout as choi_state).
QuantumChannel channel_from_choi(const Matrix& choi, const Layout& input, const Layout& output);

}  // namespace cdslab
