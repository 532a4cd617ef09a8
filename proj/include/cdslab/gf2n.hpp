#pragma once

#include "cdslab/bits.hpp"

namespace cdslab {

/// GF(2^n) in the polynomial basis, n in [1,16]. Element bit i is the
/// coefficient of x^i. Moduli are the Conway polynomials for p = 2.
class GF2n {
public:
    explicit GF2n(int n);

    int degree() const { return n_; }
    /// Modulus including the x^n term.
    u64 modulus() const { return modulus_; }
    u64 size() const { return u64{1} << n_; }

    static u64 add(u64 a, u64 b) { return a ^ b; }
    u64 mul(u64 a, u64 b) const;
    u64 pow(u64 a, u64 e) const;
    /// Throws DomainError for 0.
    u64 inv(u64 a) const;

private:
    int n_;
    u64 modulus_;
};

/// Conway polynomial of degree n over GF(2), n in [1,16].
u64 conway_modulus(int n);

}  // namespace cdslab
