#pragma once

#include <bit>
#include <cstdint>
#include <string>

namespace cdslab {

using u64 = std::uint64_t;

/// Bit i of a packed bit string is component i (component 0 is the LSB).
inline int bit(u64 v, int i) { return static_cast<int>((v >> i) & 1u); }
inline u64 low_mask(int n) { return n >= 64 ? ~u64{0} : (u64{1} << n) - 1; }
inline int parity(u64 v) { return std::popcount(v) & 1; }
inline int inner_product(u64 a, u64 b) { return parity(a & b); }
inline int hamming_distance(u64 a, u64 b) { return std::popcount(a ^ b); }

/// Smallest k with 2^k >= n (0 for n <= 1).
inline int ceil_log2(u64 n) { return n <= 1 ? 0 : 64 - std::countl_zero(n - 1); }
inline bool is_power_of_two(u64 n) { return n != 0 && (n & (n - 1)) == 0; }

/// Components 0..n-1 as a string of '0'/'1', component 0 first.
std::string bits_to_string(u64 v, int n);

/// Seed for task `index` derived from a root seed with the splitmix64 finalizer.
u64 derive_seed(u64 root, u64 index);

/// Uniform integer in [0, bound) from a 64-bit engine, by rejection, so the
/// stream is identical across standard library implementations.
template <class Engine>
u64 uniform_below(Engine& rng, u64 bound) {
    if (bound <= 1) return 0;
    const u64 limit = ~u64{0} - (~u64{0} % bound);
    u64 v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

/// Uniform double in [0,1) with 53 random bits.
template <class Engine>
double uniform_unit(Engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cdslab
