#pragma once

#include "cdslab/cds.hpp"

namespace cdslab {

/// CDS for NEQ on n-bit strings over GF(2^n), 1 <= n <= 16. Shared (a,b);
/// m_A = (a x + b, s ^ lsb(a)), m_B = a y + b. For x != y the referee
/// recovers a = (m_A1 + m_B) / (x + y), including a = 0.
CdsProtocol neq_cds(int n);

/// PSM for the inner product mod 2 with shared r1, r2 (n bits) and r3:
/// m_A = (x^r1, <x,r2>^r3), m_B = (y^r2, <y,r1>^<r1,r2>^r3).
PsmProtocol ip_psm(int n);

/// CDS for AND on single bits with one shared random bit; a party whose
/// input is 0 sends the fixed symbol 0.
CdsProtocol and_cds();

}  // namespace cdslab
