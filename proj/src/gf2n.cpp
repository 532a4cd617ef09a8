#include "cdslab/gf2n.hpp"

#include <array>

#include "cdslab/error.hpp"

namespace cdslab {

namespace {

// Full moduli, leading term included.
constexpr std::array<u64, 17> kConwayModuli = {
    0,
    0b11,                 // x + 1
    0b111,                // x^2 + x + 1
    0b1011,               // x^3 + x + 1
    0b10011,              // x^4 + x + 1
    0b100101,             // x^5 + x^2 + 1
    0b1011011,            // x^6 + x^4 + x^3 + x + 1
    0b10000011,           // x^7 + x + 1
    0b100011101,          // x^8 + x^4 + x^3 + x^2 + 1
    0b1000010001,         // x^9 + x^4 + 1
    0b10001101111,        // x^10 + x^6 + x^5 + x^3 + x^2 + x + 1
    0b100000000101,       // x^11 + x^2 + 1
    0b1000011101011,      // x^12 + x^7 + x^6 + x^5 + x^3 + x + 1
    0b10000000011011,     // x^13 + x^4 + x^3 + x + 1
    0b100000010101001,    // x^14 + x^7 + x^5 + x^3 + 1
    0b1000000000110101,   // x^15 + x^5 + x^4 + x^2 + 1
    0b10000000000101101,  // x^16 + x^5 + x^3 + x^2 + 1
};

}  // namespace

u64 conway_modulus(int n) {
    if (n < 1 || n > 16) throw DomainError("field degree must be in [1,16]");
    return kConwayModuli[static_cast<std::size_t>(n)];
}

GF2n::GF2n(int n) : n_(n), modulus_(conway_modulus(n)) {}

u64 GF2n::mul(u64 a, u64 b) const {
    u64 acc = 0;
    for (int i = 0; i < n_; ++i) {
        if ((b >> i) & 1u) acc ^= a << i;
    }
    for (int i = 2 * n_ - 2; i >= n_; --i) {
        if ((acc >> i) & 1u) acc ^= modulus_ << (i - n_);
    }
    return acc;
}

u64 GF2n::pow(u64 a, u64 e) const {
    u64 r = 1;
    while (e) {
        if (e & 1u) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

u64 GF2n::inv(u64 a) const {
    if (a == 0 || a >= size()) throw DomainError("no inverse for this field element");
    return pow(a, size() - 2);
}

}  // namespace cdslab
