#include "cdslab/quantum_protocols.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "cdslab/classical_protocols.hpp"
#include "cdslab/error.hpp"

namespace cdslab {

namespace {

using Idx = Eigen::Index;

Idx as_idx(u64 n) { return static_cast<Idx>(n); }

int checked_log2(u64 n, const char* what) {
    if (!is_power_of_two(n) || n < 2) throw DomainError(std::string(what) + ": length must be a power of 2, at least 2");
    return ceil_log2(n);
}

}  // namespace

BitString bits_from_u64(u64 v, int n) {
    BitString b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bit(v, i));
    return b;
}

double DjDistribution::probability(u64 a, u64 b) const {
    return static_cast<double>(weight(a, b)) / static_cast<double>(denominator);
}

double DjDistribution::probability_equal() const {
    const u64 n = u64{1} << log_n;
    return static_cast<double>(n * weight_by_difference[0]) / static_cast<double>(denominator);
}

DjDistribution dj_shorten(const BitString& x, const BitString& y) {
    if (x.size() != y.size()) throw DomainError("dj_shorten: x and y differ in length");
    const u64 n = x.size();
    const int log_n = checked_log2(n, "dj_shorten");
    if (log_n > 20) throw BudgetError("dj_shorten: n above 2^20");
    // S(c) for all c is the unnormalized Walsh-Hadamard transform of the phases.
    std::vector<std::int64_t> s(n);
    for (u64 i = 0; i < n; ++i) s[i] = ((x[i] ^ y[i]) & 1u) ? -1 : 1;
    for (u64 h = 1; h < n; h <<= 1) {
        for (u64 i = 0; i < n; i += 2 * h) {
            for (u64 j = i; j < i + h; ++j) {
                const std::int64_t u = s[j], v = s[j + h];
                s[j] = u + v;
                s[j + h] = u - v;
            }
        }
    }
    DjDistribution d;
    d.log_n = log_n;
    d.denominator = n * n * n;
    d.weight_by_difference.resize(n);
    for (u64 c = 0; c < n; ++c) d.weight_by_difference[c] = static_cast<u64>(s[c] * s[c]);
    return d;
}

CdsProtocol neq_promise_cds(int n) {
    const int log_n = checked_log2(static_cast<u64>(n), "neq_promise_cds");
    if (n > 64) throw BudgetError("neq_promise_cds: inputs are packed in 64 bits");
    const CdsProtocol inner = neq_cds(log_n);
    const u64 mask = low_mask(log_n);
    const int rbits = inner.randomness_bits;

    CdsProtocol p;
    p.name = "neq-promise-cds(" + std::to_string(n) + ")";
    p.nx = p.ny = n;
    p.randomness_bits = 0;
    p.secret_alphabet = 2;
    p.message_a_bits = log_n + inner.message_a_bits;
    p.message_b_bits = log_n + inner.message_b_bits;
    CorrelatedResource res;
    res.description = std::to_string(log_n) + " EPR pairs measured after phase injection and Hadamards, plus " +
                      std::to_string(rbits) + " shared random bits";
    res.denominator = static_cast<u64>(n) * n * n << rbits;
    res.randomness_bits = rbits;
    res.entanglement_pairs = log_n;
    res.visit = [n, log_n, rbits](u64 x, u64 y, const ShareVisitor& visit) {
        const DjDistribution d = dj_shorten(bits_from_u64(x, n), bits_from_u64(y, n));
        const u64 nn = static_cast<u64>(n);
        for (u64 c = 0; c < nn; ++c) {
            const u64 w = d.weight_by_difference[c];
            if (w == 0) continue;
            for (u64 a = 0; a < nn; ++a) {
                for (u64 r = 0; r < (u64{1} << rbits); ++r) visit(a | (r << log_n), (a ^ c) | (r << log_n), w);
            }
        }
    };
    p.correlated = std::move(res);
    p.message_a = [inner, log_n, mask](u64, u64 s, u64 share) {
        const u64 a = share & mask;
        return a | (inner.message_a(a, s, share >> log_n) << log_n);
    };
    p.message_b = [inner, log_n, mask](u64, u64 share) {
        const u64 b = share & mask;
        return b | (inner.message_b(b, share >> log_n) << log_n);
    };
    p.decode = [inner, log_n, mask](u64 ma, u64, u64 mb, u64) {
        return inner.decode(ma >> log_n, ma & mask, mb >> log_n, mb & mask);
    };
    return p;
}

CdqsProtocol neq_promise_cdqs(int n) {
    const int log_n = checked_log2(static_cast<u64>(n), "neq_promise_cdqs");
    if (n > 2) throw BudgetError("neq_promise_cdqs: only n = 2 fits the dense simulation budget");
    const CdsProtocol key = parallel_extend(neq_cds(log_n), 2);
    const u64 dn = static_cast<u64>(n);
    const u64 dr = u64{1} << key.randomness_bits;
    const u64 mask = low_mask(log_n);
    const u64 da = u64{1} << (log_n + key.message_a_bits);
    const u64 db = u64{1} << (log_n + key.message_b_bits);
    const double h = 1.0 / std::sqrt(static_cast<double>(n));
    auto hadamard = [h](u64 a, u64 i) { return inner_product(a, i) ? -h : h; };

    CdqsProtocol p;
    p.name = "neq-promise-cdqs(" + std::to_string(n) + ")";
    p.construction = "neq_promise_cdqs(" + std::to_string(n) + ")";
    p.nx = p.ny = n;
    p.secret = Layout{{"Q", 2}};
    p.resource = tensor(maximally_entangled("Ldj", "Rdj", dn), maximally_entangled("Lr", "Rr", dr));
    p.alice_resource = {"Ldj", "Lr"};
    p.alice_output = Layout{{"MA", da}, {"MQ", 2}};
    p.bob_output = Layout{{"MB", db}};
    p.classical_registers = {"MA", "MB"};
    p.randomness_registers = {"Lr", "Rr"};

    const Layout alice_in{{"Q", 2}, {"Ldj", dn}, {"Lr", dr}};
    const Layout alice_out = p.alice_output;
    p.alice = [=](u64 x) {
        std::vector<Matrix> kraus;
        for (u64 k = 0; k < 4; ++k) {
            const Matrix pad = pauli_pad(k);
            for (u64 a = 0; a < dn; ++a) {
                for (u64 r = 0; r < dr; ++r) {
                    Matrix op = Matrix::Zero(as_idx(alice_out.total_dim()), as_idx(alice_in.total_dim()));
                    const u64 ma = a | (key.message_a(a, k, r) << log_n);
                    for (u64 i = 0; i < dn; ++i) {
                        const double amp = 0.5 * hadamard(a, i) * (bit(x, static_cast<int>(i)) ? -1.0 : 1.0);
                        for (Idx qo = 0; qo < 2; ++qo)
                            for (Idx qi = 0; qi < 2; ++qi)
                                op(as_idx(ma) * 2 + qo, (qi * as_idx(dn) + as_idx(i)) * as_idx(dr) + as_idx(r)) =
                                    amp * pad(qo, qi);
                    }
                    kraus.push_back(std::move(op));
                }
            }
        }
        return QuantumChannel(std::move(kraus), alice_in, alice_out);
    };
    const Layout bob_in{{"Rdj", dn}, {"Rr", dr}};
    const Layout bob_out = p.bob_output;
    p.bob = [=](u64 y) {
        std::vector<Matrix> kraus;
        for (u64 b = 0; b < dn; ++b) {
            for (u64 r = 0; r < dr; ++r) {
                Matrix op = Matrix::Zero(as_idx(db), as_idx(dn * dr));
                const u64 mb = b | (key.message_b(b, r) << log_n);
                for (u64 i = 0; i < dn; ++i)
                    op(as_idx(mb), as_idx(i * dr + r)) = hadamard(b, i) * (bit(y, static_cast<int>(i)) ? -1.0 : 1.0);
                kraus.push_back(std::move(op));
            }
        }
        return QuantumChannel(std::move(kraus), bob_in, bob_out);
    };
    const Layout msg = p.message_layout();
    const Layout q = p.secret;
    p.decoder = [=](u64 x, u64 y) -> std::optional<QuantumChannel> {
        if (x == y) return std::nullopt;
        std::vector<Matrix> kraus;
        for (u64 ma = 0; ma < da; ++ma) {
            for (u64 mb = 0; mb < db; ++mb) {
                const u64 a = ma & mask, b = mb & mask;
                const u64 k = a == b ? 0 : key.decode(ma >> log_n, a, mb >> log_n, b) & 3u;
                const Matrix undo = pauli_pad(k).adjoint();
                Matrix op = Matrix::Zero(2, as_idx(msg.total_dim()));
                for (Idx qo = 0; qo < 2; ++qo)
                    for (Idx qi = 0; qi < 2; ++qi) op(qo, (as_idx(ma) * 2 + qi) * as_idx(db) + as_idx(mb)) = undo(qo, qi);
                kraus.push_back(std::move(op));
            }
        }
        return QuantumChannel(std::move(kraus), msg, q);
    };
    return p;
}

CdqsProtocol lifted_neq_cdqs() {
    CdqsProtocol p = classical_to_quantum_lift(parallel_extend(neq_cds(1), 2));
    p.name = "lifted-neq";
    p.construction = "classical_to_quantum_lift(neq_cds(1)^2)";
    return p;
}

u64 matching_parity(const BhmInstance& inst) {
    u64 m = 0;
    for (std::size_t k = 0; k < inst.matching.size(); ++k) {
        const auto [i, j] = inst.matching[k];
        m |= static_cast<u64>(bit(inst.x, i) ^ bit(inst.x, j)) << k;
    }
    return m;
}

namespace {

bool weight_allowed(int n, int t, int value) {
    return value == 1 ? (3 * t >= 2 * n && t <= n) : (t >= 0 && 3 * t < n);
}

}  // namespace

void validate_bhm_instance(const BhmInstance& inst) {
    if (inst.n < 1 || 2 * inst.n > 24) throw DomainError("BHM size must satisfy 1 <= n and 2n <= 24");
    if (inst.matching.size() != static_cast<std::size_t>(inst.n)) throw DomainError("matching must have n edges");
    u64 seen = 0;
    for (const auto& [i, j] : inst.matching) {
        if (i < 0 || j < 0 || i >= 2 * inst.n || j >= 2 * inst.n || i == j) throw DomainError("matching index out of range");
        if (bit(seen, i) || bit(seen, j)) throw DomainError("matching edges overlap");
        seen |= (u64{1} << i) | (u64{1} << j);
    }
    if ((inst.x >> (2 * inst.n)) != 0 || (inst.w >> inst.n) != 0) throw DomainError("x or w has stray high bits");
    if (inst.promised_value != 0 && inst.promised_value != 1) throw DomainError("promised value must be 0 or 1");
    const int t = std::popcount(matching_parity(inst) ^ inst.w);
    if (!weight_allowed(inst.n, t, inst.promised_value)) {
        throw DomainError("weight " + std::to_string(t) + " of Mx^w breaks the promise for value " +
                          std::to_string(inst.promised_value));
    }
}

BhmInstance bhm_instance(int n, int target_value, u64 seed, std::optional<int> weight) {
    if (n < 1 || 2 * n > 24) throw DomainError("BHM size must satisfy 1 <= n and 2n <= 24");
    if (target_value != 0 && target_value != 1) throw DomainError("target value must be 0 or 1");
    std::vector<int> allowed;
    for (int t = 0; t <= n; ++t)
        if (weight_allowed(n, t, target_value)) allowed.push_back(t);
    if (allowed.empty()) throw DomainError("no Hamming weight satisfies the promise at this size");
    std::mt19937_64 rng(seed);
    int t;
    if (weight) {
        if (!weight_allowed(n, *weight, target_value)) throw DomainError("requested weight breaks the promise");
        t = *weight;
    } else {
        t = allowed[uniform_below(rng, allowed.size())];
    }
    std::vector<int> perm(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < 2 * n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[uniform_below(rng, i + 1)]);
    BhmInstance inst;
    inst.n = n;
    inst.promised_value = target_value;
    for (int k = 0; k < n; ++k) {
        const int i = perm[static_cast<std::size_t>(2 * k)], j = perm[static_cast<std::size_t>(2 * k + 1)];
        inst.matching.emplace_back(std::min(i, j), std::max(i, j));
    }
    inst.x = rng() & low_mask(2 * n);
    std::vector<int> edges(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) edges[static_cast<std::size_t>(k)] = k;
    for (std::size_t i = edges.size() - 1; i > 0; --i) std::swap(edges[i], edges[uniform_below(rng, i + 1)]);
    u64 flips = 0;
    for (int k = 0; k < t; ++k) flips |= u64{1} << edges[static_cast<std::size_t>(k)];
    inst.w = matching_parity(inst) ^ flips;
    validate_bhm_instance(inst);
    return inst;
}

std::string format_bhm_instance(const BhmInstance& inst) {
    std::ostringstream os;
    char buf[32];
    os << "n: " << inst.n << "\n";
    std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(inst.x));
    os << "x: " << buf << "\n";
    os << "matching:";
    for (const auto& [i, j] : inst.matching) os << " " << i << "-" << j;
    os << "\n";
    std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(inst.w));
    os << "w: " << buf << "\n";
    os << "promised_value: " << inst.promised_value << "\n";
    return os.str();
}

BhmInstance parse_bhm_instance(const std::string& text) {
    BhmInstance inst;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    int fields = 0;
    auto fail = [&](const std::string& why) { throw FormatError("line " + std::to_string(line_no) + ": " + why); };
    auto parse_hex = [&](const std::string& v) -> u64 {
        std::size_t used = 0;
        u64 out = 0;
        try {
            out = std::stoull(v, &used, 16);
        } catch (const std::exception&) {
            fail("bad hex value '" + v + "'");
        }
        if (used != v.size()) fail("bad hex value '" + v + "'");
        return out;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) fail("expected 'key: value'");
        const std::string key = line.substr(0, colon);
        std::istringstream vs(line.substr(colon + 1));
        if (key == "n") {
            if (!(vs >> inst.n)) fail("bad n");
        } else if (key == "x" || key == "w") {
            std::string v;
            if (!(vs >> v)) fail("missing value for " + key);
            (key == "x" ? inst.x : inst.w) = parse_hex(v);
        } else if (key == "matching") {
            std::string edge;
            while (vs >> edge) {
                const auto dash = edge.find('-');
                if (dash == std::string::npos) fail("bad edge '" + edge + "'");
                try {
                    inst.matching.emplace_back(std::stoi(edge.substr(0, dash)), std::stoi(edge.substr(dash + 1)));
                } catch (const std::exception&) {
                    fail("bad edge '" + edge + "'");
                }
            }
        } else if (key == "promised_value") {
            if (!(vs >> inst.promised_value)) fail("bad promised_value");
        } else {
            fail("unknown key '" + key + "'");
        }
        ++fields;
    }
    if (fields != 5) throw FormatError("expected the fields n, x, matching, w, promised_value");
    validate_bhm_instance(inst);
    return inst;
}

BhmPsqm bhm_psqm(int n) {
    if (n < 1 || 2 * n > 24) throw DomainError("BHM size must satisfy 1 <= n and 2n <= 24");
    BhmPsqm p;
    p.n = n;
    p.register_qubits = ceil_log2(static_cast<u64>(2 * n));
    p.register_dim = u64{1} << p.register_qubits;
    p.inner = ip_psm(p.register_qubits + 2);
    return p;
}

std::vector<BhmOutcome> BhmPsqm::outcomes(const BhmInstance& inst) const {
    if (inst.n != n) throw DomainError("instance size does not match the protocol");
    std::vector<BhmOutcome> out;
    for (int e = 0; e < n; ++e) {
        const auto [i, j] = inst.matching[static_cast<std::size_t>(e)];
        for (u64 k = 0; k < register_dim; ++k) {
            for (u64 l = 0; l < register_dim; ++l) {
                // Twice the amplitude after the projection and both Hadamard layers.
                const int amp = (bit(inst.x, i) ^ inner_product(static_cast<u64>(i), k ^ l) ? -1 : 1) +
                                (bit(inst.x, j) ^ inner_product(static_cast<u64>(j), k ^ l) ? -1 : 1);
                if (amp != 0) out.push_back({k, l, e, static_cast<u64>(amp * amp / 4)});
            }
        }
    }
    return out;
}

u64 BhmPsqm::alice_inner_input(u64 k) const {
    return k | (u64{1} << register_qubits) | (u64{1} << (register_qubits + 1));
}

u64 BhmPsqm::bob_inner_input(const BhmInstance& inst, u64 l, int edge) const {
    const auto [i, j] = inst.matching[static_cast<std::size_t>(edge)];
    const u64 b = static_cast<u64>(i ^ j);
    return b | (static_cast<u64>(inner_product(l, b)) << register_qubits) |
           (static_cast<u64>(bit(inst.w, edge)) << (register_qubits + 1));
}

int BhmPsqm::vote(const BhmInstance& inst, const BhmOutcome& o, u64 r) const {
    const u64 ma = inner.message_a(alice_inner_input(o.k), r);
    const u64 mb = inner.message_b(bob_inner_input(inst, o.l, o.edge), r);
    return static_cast<int>(inner.decode(ma, mb));
}

double BhmPsqm::probability_vote_one(const BhmInstance& inst) const {
    u64 ones = 0;
    for (const auto& o : outcomes(inst))
        if (vote(inst, o, 0)) ones += o.weight;
    return static_cast<double>(ones) / static_cast<double>(outcome_denominator());
}

CostReport BhmPsqm::cost() const {
    CostReport c = protocol_cost(inner);
    c.entanglement_pairs = register_qubits;
    return c;
}

double majority_success(double p, int t) {
    if (t < 1 || t % 2 == 0) throw DomainError("majority vote needs an odd repetition count");
    double total = 0.0;
    for (int j = t / 2 + 1; j <= t; ++j) {
        total += std::exp(std::lgamma(t + 1.0) - std::lgamma(j + 1.0) - std::lgamma(t - j + 1.0)) * std::pow(p, j) *
                 std::pow(1.0 - p, t - j);
    }
    return total;
}

}  // namespace cdslab
