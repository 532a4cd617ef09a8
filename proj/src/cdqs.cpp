#include "cdslab/cdqs.hpp"

#include <algorithm>
#include <cmath>

#include "cdslab/error.hpp"

namespace cdslab {

namespace {

using Idx = Eigen::Index;

Idx as_idx(std::size_t n) { return static_cast<Idx>(n); }

std::vector<std::string> concat_names(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<std::string> suffix_all(const std::vector<std::string>& v, const std::string& suffix) {
    std::vector<std::string> out;
    for (const auto& s : v) out.push_back(s + suffix);
    return out;
}

QuantumChannel suffixed(const QuantumChannel& ch, const std::string& suffix) {
    return ch.relabeled(ch.input_layout().suffixed(suffix), ch.output_layout().suffixed(suffix));
}

QuantumChannel tensor_all(const std::vector<QuantumChannel>& chans) {
    QuantumChannel acc = chans.front();
    for (std::size_t i = 1; i < chans.size(); ++i) acc = tensor(acc, chans[i]);
    return acc;
}

// Resource amplitudes as a dL x dR matrix with Alice's registers as rows.
Matrix resource_matrix(const CdqsProtocol& p, const std::vector<std::string>& lnames,
                       const std::vector<std::string>& rnames) {
    const Layout& rl = p.resource.layout();
    const Idx dl = as_idx(rl.select(lnames).total_dim());
    const Idx dr = as_idx(rl.select(rnames).total_dim());
    const Vector v = rl.empty() ? p.resource.amplitudes() : reorder(p.resource.amplitudes(), rl, concat_names(lnames, rnames));
    Matrix m(dl, dr);
    for (Idx i = 0; i < dl; ++i)
        for (Idx j = 0; j < dr; ++j) m(i, j) = v(i * dr + j);
    return m;
}

QuantumChannel direct_effective_channel(const CdqsProtocol& p, u64 x, u64 y) {
    const auto lnames = p.alice_resource;
    const auto rnames = p.bob_resource();
    const QuantumChannel a = with_input_order(p.alice(x), concat_names(p.secret.names(), lnames));
    const QuantumChannel b = with_input_order(p.bob(y), rnames);
    if (a.output_layout() != p.alice_output || b.output_layout() != p.bob_output) {
        throw LayoutError(p.name + ": channel outputs do not match the declared message layout");
    }
    const Matrix psi = resource_matrix(p, lnames, rnames);
    const Idx dq = as_idx(p.d_q());
    const Idx dl = psi.rows();
    const Idx dma = as_idx(a.output_dim());
    const Idx dmb = as_idx(b.output_dim());
    std::vector<Matrix> kraus;
    kraus.reserve(a.kraus().size() * b.kraus().size());
    std::vector<Matrix> xs(static_cast<std::size_t>(dq));
    for (const auto& aj : a.kraus()) {
        for (Idx q = 0; q < dq; ++q) xs[static_cast<std::size_t>(q)] = aj.block(0, q * dl, dma, dl) * psi;
        for (const auto& bk : b.kraus()) {
            Matrix k(dma * dmb, dq);
            for (Idx q = 0; q < dq; ++q) {
                const Matrix y_q = xs[static_cast<std::size_t>(q)] * bk.transpose();
                for (Idx i = 0; i < dma; ++i)
                    for (Idx j = 0; j < dmb; ++j) k(i * dmb + j, q) = y_q(i, j);
            }
            if (k.squaredNorm() > 1e-30) kraus.push_back(std::move(k));
        }
    }
    QuantumChannel n(std::move(kraus), p.secret, p.message_layout());
    if (n.kraus().size() > 1) return minimal_kraus(n);
    return n;
}

}  // namespace

std::vector<std::string> CdqsProtocol::bob_resource() const {
    std::vector<std::string> out;
    for (const auto& s : resource.layout()) {
        if (std::find(alice_resource.begin(), alice_resource.end(), s.name) == alice_resource.end()) {
            out.push_back(s.name);
        }
    }
    return out;
}

QuantumChannel effective_channel(const CdqsProtocol& p, u64 x, u64 y) {
    if (p.components.empty()) return direct_effective_channel(p, x, y);
    std::vector<QuantumChannel> parts;
    double entries = 1.0;
    for (const auto& c : p.components) {
        parts.push_back(effective_channel(c, x, y));
        entries *= static_cast<double>(parts.back().kraus().size() * parts.back().input_dim() *
                                       parts.back().output_dim());
    }
    if (entries > static_cast<double>(1u << 22)) {
        throw BudgetError(p.name + ": effective channel of the repetition is too large to form");
    }
    const QuantumChannel t = tensor_all(parts);
    return with_output_order(t, p.message_layout().names());
}

DensityMatrix run_cdqs(const CdqsProtocol& p, u64 x, u64 y, const DensityMatrix& secret) {
    if (secret.layout() != p.secret) {
        throw LayoutError("secret layout " + to_string(secret.layout()) + " does not match " + to_string(p.secret));
    }
    return apply_channel(effective_channel(p, x, y), secret);
}

DensityMatrix mid_protocol_state(const CdqsProtocol& p, u64 x, u64 y) {
    const std::size_t dq = p.d_q();
    const QuantumChannel n = effective_channel(p, x, y);
    const QuantumChannel nin = n.relabeled(Layout{{"#secret", dq}}, n.output_layout());
    const auto phi = DensityMatrix::pure(maximally_entangled(kReferenceName, "#secret", dq));
    return apply_channel(nin, phi);
}

CdqsProtocol relabel_protocol(const CdqsProtocol& p, const std::string& sfx) {
    CdqsProtocol q = p;
    q.name = p.name + sfx;
    q.secret = p.secret.suffixed(sfx);
    q.resource = StateVector(p.resource.amplitudes(), p.resource.layout().suffixed(sfx));
    q.alice_resource = suffix_all(p.alice_resource, sfx);
    q.alice_output = p.alice_output.suffixed(sfx);
    q.bob_output = p.bob_output.suffixed(sfx);
    auto alice = p.alice;
    auto bob = p.bob;
    auto dec = p.decoder;
    q.alice = [alice, sfx](u64 x) { return suffixed(alice(x), sfx); };
    q.bob = [bob, sfx](u64 y) { return suffixed(bob(y), sfx); };
    q.decoder = [dec, sfx](u64 x, u64 y) -> std::optional<QuantumChannel> {
        auto d = dec(x, y);
        if (!d) return std::nullopt;
        return suffixed(*d, sfx);
    };
    q.classical_registers = suffix_all(p.classical_registers, sfx);
    q.randomness_registers = suffix_all(p.randomness_registers, sfx);
    q.components.clear();
    for (const auto& c : p.components) q.components.push_back(relabel_protocol(c, sfx));
    return q;
}

CdqsProtocol parallel_repeat(const CdqsProtocol& p, int k) {
    if (k < 1) throw DomainError("repetition count must be at least 1");
    if (k == 1) return p;
    if (!p.components.empty()) throw DomainError("cannot repeat a protocol that is already a repetition");
    const double per_copy = static_cast<double>(p.d_q() * p.message_layout().total_dim());
    if (std::pow(per_copy, k) > static_cast<double>(kRepeatBudget)) {
        throw BudgetError(p.name + ": " + std::to_string(k) + "-fold repetition exceeds the dimension budget");
    }
    std::vector<CdqsProtocol> copies;
    for (int i = 1; i <= k; ++i) copies.push_back(relabel_protocol(p, "#" + std::to_string(i)));

    CdqsProtocol q;
    q.name = p.name + "^" + std::to_string(k);
    q.construction = "parallel_repeat(" + p.construction + ", " + std::to_string(k) + ")";
    q.nx = p.nx;
    q.ny = p.ny;
    StateVector res = copies[0].resource;
    q.secret = copies[0].secret;
    q.alice_resource = copies[0].alice_resource;
    q.alice_output = copies[0].alice_output;
    q.bob_output = copies[0].bob_output;
    q.classical_registers = copies[0].classical_registers;
    q.randomness_registers = copies[0].randomness_registers;
    for (int i = 1; i < k; ++i) {
        const auto& c = copies[static_cast<std::size_t>(i)];
        res = tensor(res, c.resource);
        q.secret = q.secret.concat(c.secret);
        q.alice_resource = concat_names(q.alice_resource, c.alice_resource);
        q.alice_output = q.alice_output.concat(c.alice_output);
        q.bob_output = q.bob_output.concat(c.bob_output);
        q.classical_registers = concat_names(q.classical_registers, c.classical_registers);
        q.randomness_registers = concat_names(q.randomness_registers, c.randomness_registers);
    }
    q.resource = std::move(res);
    q.alice = [copies](u64 x) {
        std::vector<QuantumChannel> ch;
        for (const auto& c : copies) ch.push_back(c.alice(x));
        return tensor_all(ch);
    };
    q.bob = [copies](u64 y) {
        std::vector<QuantumChannel> ch;
        for (const auto& c : copies) ch.push_back(c.bob(y));
        return tensor_all(ch);
    };
    const auto order = q.message_layout().names();
    q.decoder = [copies, order](u64 x, u64 y) -> std::optional<QuantumChannel> {
        std::vector<QuantumChannel> ch;
        for (const auto& c : copies) {
            auto d = c.decoder(x, y);
            if (!d) return std::nullopt;
            ch.push_back(*d);
        }
        return with_input_order(tensor_all(ch), order);
    };
    q.components = std::move(copies);
    return q;
}

Matrix pauli_pad(u64 k) {
    Matrix x(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    Matrix p = Matrix::Identity(2, 2);
    if (k & 1u) p = p * x;
    if (k & 2u) p = p * z;
    return p;
}

CdqsProtocol classical_to_quantum_lift(const CdsProtocol& key_cds) {
    if (key_cds.secret_alphabet != 4) {
        throw DomainError("the one-time-pad lift needs a CDS for 2-bit secrets");
    }
    if (key_cds.correlated) {
        throw DomainError("the one-time-pad lift needs plain shared randomness");
    }
    if (key_cds.randomness_bits > 8 || key_cds.message_a_bits + key_cds.message_b_bits > 8) {
        throw BudgetError("key CDS too large to lift densely");
    }
    const std::size_t dr = std::size_t{1} << key_cds.randomness_bits;
    const std::size_t da = std::size_t{1} << key_cds.message_a_bits;
    const std::size_t db = std::size_t{1} << key_cds.message_b_bits;

    CdqsProtocol p;
    p.name = "lift(" + key_cds.name + ")";
    p.construction = "classical_to_quantum_lift(" + key_cds.name + ")";
    p.nx = key_cds.nx;
    p.ny = key_cds.ny;
    p.secret = Layout{{"Q", 2}};
    {
        Vector v = Vector::Zero(as_idx(dr * dr));
        for (std::size_t r = 0; r < dr; ++r) v(as_idx(r * dr + r)) = 1.0 / std::sqrt(static_cast<double>(dr));
        p.resource = StateVector(std::move(v), Layout{{"L", dr}, {"R", dr}});
    }
    p.alice_resource = {"L"};
    p.alice_output = Layout{{"MA", da}, {"MQ", 2}};
    p.bob_output = Layout{{"MB", db}};
    p.classical_registers = {"MA", "MB"};
    p.randomness_registers = {"L", "R"};

    const Layout alice_in{{"Q", 2}, {"L", dr}};
    const Layout alice_out = p.alice_output;
    const Layout bob_in{{"R", dr}};
    const Layout bob_out = p.bob_output;
    p.alice = [key_cds, alice_in, alice_out, dr](u64 x) {
        std::vector<Matrix> kraus;
        const Idx d_l = as_idx(dr);
        for (u64 k = 0; k < 4; ++k) {
            const Matrix pad = pauli_pad(k);
            for (u64 r = 0; r < dr; ++r) {
                Matrix op = Matrix::Zero(as_idx(alice_out.total_dim()), as_idx(alice_in.total_dim()));
                const auto ma = static_cast<Idx>(key_cds.message_a(x, k, r));
                for (Idx qo = 0; qo < 2; ++qo)
                    for (Idx qi = 0; qi < 2; ++qi) op(ma * 2 + qo, qi * d_l + static_cast<Idx>(r)) = 0.5 * pad(qo, qi);
                kraus.push_back(std::move(op));
            }
        }
        return QuantumChannel(std::move(kraus), alice_in, alice_out);
    };
    p.bob = [key_cds, bob_in, bob_out, dr](u64 y) {
        std::vector<Matrix> kraus;
        for (u64 r = 0; r < dr; ++r) {
            Matrix op = Matrix::Zero(as_idx(bob_out.total_dim()), as_idx(dr));
            op(static_cast<Idx>(key_cds.message_b(y, r)), static_cast<Idx>(r)) = 1.0;
            kraus.push_back(std::move(op));
        }
        return QuantumChannel(std::move(kraus), bob_in, bob_out);
    };
    const Layout msg = p.message_layout();
    const Layout q = p.secret;
    p.decoder = [key_cds, msg, q, da, db](u64 x, u64 y) -> std::optional<QuantumChannel> {
        std::vector<Matrix> kraus;
        const Idx d_b = as_idx(db);
        for (u64 ma = 0; ma < da; ++ma) {
            for (u64 mb = 0; mb < db; ++mb) {
                const Matrix undo = pauli_pad(key_cds.decode(ma, x, mb, y) & 3u).adjoint();
                Matrix op = Matrix::Zero(2, as_idx(msg.total_dim()));
                for (Idx qo = 0; qo < 2; ++qo)
                    for (Idx qi = 0; qi < 2; ++qi)
                        op(qo, (static_cast<Idx>(ma) * 2 + qi) * d_b + static_cast<Idx>(mb)) = undo(qo, qi);
                kraus.push_back(std::move(op));
            }
        }
        return QuantumChannel(std::move(kraus), msg, q);
    };
    return p;
}

CdqsProtocol forwarding_cdqs() {
    CdqsProtocol p;
    p.name = "forwarding";
    p.construction = "forwarding";
    p.nx = 1;
    p.ny = 1;
    p.secret = Layout{{"Q", 2}};
    p.alice_output = Layout{{"MQ", 2}};
    const Layout in = p.secret, out = p.alice_output;
    p.alice = [in, out](u64) { return QuantumChannel::identity(in).relabeled(in, out); };
    p.bob = [](u64) { return QuantumChannel::identity(Layout{}); };
    p.decoder = [in, out](u64, u64) -> std::optional<QuantumChannel> {
        return QuantumChannel::identity(in).relabeled(out, in);
    };
    return p;
}

namespace {

CdqsProtocol and_key_base(double leak) {
    CdqsProtocol p;
    p.nx = 1;
    p.ny = 1;
    p.secret = Layout{{"Q", 2}};
    {
        Vector v = Vector::Zero(16);
        for (Idx r = 0; r < 4; ++r) v(r * 4 + r) = 0.5;
        p.resource = StateVector(std::move(v), Layout{{"L", 4}, {"R", 4}});
    }
    p.alice_resource = {"L"};
    p.alice_output = Layout{{"MQ", 2}};
    p.bob_output = Layout{{"MB", 4}};
    p.classical_registers = {"MB"};
    p.randomness_registers = {"L", "R"};
    const Layout alice_in{{"Q", 2}, {"L", 4}};
    const Layout alice_out = p.alice_output;
    p.alice = [alice_in, alice_out, leak](u64 x) {
        if (x & 1u) {
            std::vector<Matrix> kraus;
            for (u64 r = 0; r < 4; ++r) {
                Matrix op = Matrix::Zero(2, 8);
                const Matrix pad = pauli_pad(r);
                for (Idx qo = 0; qo < 2; ++qo)
                    for (Idx qi = 0; qi < 2; ++qi) op(qo, qi * 4 + static_cast<Idx>(r)) = pad(qo, qi);
                kraus.push_back(std::move(op));
            }
            return QuantumChannel(std::move(kraus), alice_in, alice_out);
        }
        const auto mixed = QuantumChannel::constant(alice_in, DensityMatrix::maximally_mixed(alice_out));
        if (leak <= 0.0) return mixed;
        std::vector<Matrix> kraus;
        for (const auto& k : mixed.kraus()) kraus.push_back(std::sqrt(1.0 - leak) * k);
        for (Idx r = 0; r < 4; ++r) {
            Matrix op = Matrix::Zero(2, 8);
            for (Idx q = 0; q < 2; ++q) op(q, q * 4 + r) = std::sqrt(leak);
            kraus.push_back(std::move(op));
        }
        return QuantumChannel(std::move(kraus), alice_in, alice_out);
    };
    const Layout bob_in{{"R", 4}};
    const Layout bob_out = p.bob_output;
    p.bob = [bob_in, bob_out](u64 y) {
        std::vector<Matrix> kraus;
        for (Idx r = 0; r < 4; ++r) {
            Matrix op = Matrix::Zero(4, 4);
            op((y & 1u) ? r : 0, r) = 1.0;
            kraus.push_back(std::move(op));
        }
        return QuantumChannel(std::move(kraus), bob_in, bob_out);
    };
    const Layout msg = p.message_layout();
    const Layout q = p.secret;
    p.decoder = [msg, q](u64 x, u64 y) -> std::optional<QuantumChannel> {
        if (!((x & y) & 1u)) return std::nullopt;
        std::vector<Matrix> kraus;
        for (Idx mb = 0; mb < 4; ++mb) {
            const Matrix undo = pauli_pad(static_cast<u64>(mb)).adjoint();
            Matrix op = Matrix::Zero(2, 8);
            for (Idx qo = 0; qo < 2; ++qo)
                for (Idx qi = 0; qi < 2; ++qi) op(qo, qi * 4 + mb) = undo(qo, qi);
            kraus.push_back(std::move(op));
        }
        return QuantumChannel(std::move(kraus), msg, q);
    };
    return p;
}

}  // namespace

CdqsProtocol and_key_cdqs() {
    CdqsProtocol p = and_key_base(0.0);
    p.name = "and-key";
    p.construction = "and_key_cdqs";
    return p;
}

CdqsProtocol leaky_and_key_cdqs(double leak) {
    if (leak < 0.0 || leak > 1.0) throw DomainError("leak probability must be in [0,1]");
    CdqsProtocol p = and_key_base(leak);
    p.name = "and-key-leak" + std::to_string(leak).substr(0, 4);
    p.construction = "leaky_and_key_cdqs(" + std::to_string(leak) + ")";
    return p;
}

CdqsProtocol with_secret_noise(const CdqsProtocol& p, const QuantumChannel& noise, const std::string& tag) {
    if (!p.components.empty() || p.secret.size() != 1) {
        throw DomainError("secret noise needs a single-register, unrepeated protocol");
    }
    if (noise.input_dim() != p.d_q() || noise.output_dim() != p.d_q()) {
        throw LayoutError("noise channel must act on the secret");
    }
    CdqsProtocol q = p;
    q.name = p.name + "+" + tag;
    q.construction = p.construction + "+" + tag;
    const QuantumChannel on_q = noise.relabeled(p.secret, p.secret);
    auto alice = p.alice;
    const std::string qname = p.secret[0].name;
    q.alice = [alice, on_q, qname](u64 x) {
        const QuantumChannel a = alice(x);
        if (a.input_layout()[0].name != qname) {
            throw LayoutError("Alice's channel must take the secret first");
        }
        const Layout rest = a.input_layout().without({qname});
        const QuantumChannel pre = rest.empty() ? on_q : tensor(on_q, QuantumChannel::identity(rest));
        return compose(a, pre);
    };
    return q;
}

CostReport protocol_cost(const CdqsProtocol& p) {
    CostReport c;
    auto in = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    for (const auto& s : p.message_layout()) {
        (in(p.classical_registers, s.name) ? c.communication_bits : c.communication_qubits) += ceil_log2(s.dim);
    }
    for (const auto& name : p.alice_resource) {
        const int b = ceil_log2(p.resource.layout().dim_of(name));
        (in(p.randomness_registers, name) ? c.randomness_bits : c.entanglement_pairs) += b;
    }
    return c;
}

}  // namespace cdslab
