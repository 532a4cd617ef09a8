#include "cdslab/classical_protocols.hpp"

#include <memory>

#include "cdslab/error.hpp"
#include "cdslab/gf2n.hpp"

namespace cdslab {

CdsProtocol neq_cds(int n) {
    if (n < 1 || n > 16) throw DomainError("neq_cds needs 1 <= n <= 16");
    auto field = std::make_shared<GF2n>(n);
    const u64 mask = low_mask(n);
    CdsProtocol p;
    p.name = "neq-cds(" + std::to_string(n) + ")";
    p.nx = p.ny = n;
    p.randomness_bits = 2 * n;
    p.secret_alphabet = 2;
    p.message_a_bits = n + 1;
    p.message_b_bits = n;
    p.message_a = [field, n, mask](u64 x, u64 s, u64 r) {
        const u64 a = r & mask, b = (r >> n) & mask;
        return (field->mul(a, x & mask) ^ b) | (((s ^ a) & 1u) << n);
    };
    p.message_b = [field, n, mask](u64 y, u64 r) {
        const u64 a = r & mask, b = (r >> n) & mask;
        return field->mul(a, y & mask) ^ b;
    };
    p.decode = [field, n, mask](u64 ma, u64 x, u64 mb, u64 y) -> u64 {
        if (((x ^ y) & mask) == 0) return 0;
        const u64 a = field->mul((ma & mask) ^ mb, field->inv((x ^ y) & mask));
        return ((ma >> n) ^ a) & 1u;
    };
    return p;
}

PsmProtocol ip_psm(int n) {
    if (n < 1 || n > 16) throw DomainError("ip_psm needs 1 <= n <= 16");
    const u64 mask = low_mask(n);
    PsmProtocol p;
    p.name = "ip-psm(" + std::to_string(n) + ")";
    p.nx = p.ny = n;
    p.randomness_bits = 2 * n + 1;
    p.output_alphabet = 2;
    p.message_a_bits = n + 1;
    p.message_b_bits = n + 1;
    p.message_a = [n, mask](u64 x, u64 r) {
        const u64 r1 = r & mask, r2 = (r >> n) & mask, r3 = (r >> (2 * n)) & 1u;
        return ((x ^ r1) & mask) | (static_cast<u64>(inner_product(x, r2) ^ static_cast<int>(r3)) << n);
    };
    p.message_b = [n, mask](u64 y, u64 r) {
        const u64 r1 = r & mask, r2 = (r >> n) & mask, r3 = (r >> (2 * n)) & 1u;
        const int beta = inner_product(y, r1) ^ inner_product(r1, r2) ^ static_cast<int>(r3);
        return ((y ^ r2) & mask) | (static_cast<u64>(beta) << n);
    };
    p.decode = [n, mask](u64 ma, u64 mb) {
        return static_cast<u64>(inner_product(ma & mask, mb & mask) ^ bit(ma, n) ^ bit(mb, n));
    };
    return p;
}

CdsProtocol and_cds() {
    CdsProtocol p;
    p.name = "and-cds";
    p.nx = p.ny = 1;
    p.randomness_bits = 1;
    p.secret_alphabet = 2;
    p.message_a_bits = 1;
    p.message_b_bits = 1;
    p.message_a = [](u64 x, u64 s, u64 r) -> u64 { return (x & 1u) ? (s ^ r) & 1u : 0; };
    p.message_b = [](u64 y, u64 r) -> u64 { return (y & 1u) ? r & 1u : 0; };
    p.decode = [](u64 ma, u64, u64 mb, u64) { return (ma ^ mb) & 1u; };
    return p;
}

}  // namespace cdslab
