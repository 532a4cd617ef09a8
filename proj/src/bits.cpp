#include "cdslab/bits.hpp"

namespace cdslab {

std::string bits_to_string(u64 v, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i) {
        if (bit(v, i)) s[static_cast<std::size_t>(i)] = '1';
    }
    return s;
}

u64 derive_seed(u64 root, u64 index) {
    u64 z = root + (index + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace cdslab
