#include "cdslab/promise.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "cdslab/error.hpp"

namespace cdslab {

namespace {

std::vector<InputPair> all_pairs(int nx, int ny) {
    if (nx + ny > 24) {
        throw BudgetError("too many input pairs to list");
    }
    std::vector<InputPair> out;
    out.reserve(std::size_t{1} << (nx + ny));
    for (u64 x = 0; x < (u64{1} << nx); ++x) {
        for (u64 y = 0; y < (u64{1} << ny); ++y) out.push_back({x, y});
    }
    return out;
}

FValue from_bit(int b) { return b ? FValue::one : FValue::zero; }

// Uniformly random n-bit mask of weight n/2.
u64 random_half_weight(std::mt19937_64& rng, int n) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    u64 m = 0;
    for (int i = 0; i < n / 2; ++i) {
        const auto j = static_cast<std::size_t>(i) + uniform_below(rng, static_cast<u64>(n - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
        m |= u64{1} << idx[static_cast<std::size_t>(i)];
    }
    return m;
}

}  // namespace

std::vector<InputPair> PromiseFunction::inputs_with(FValue v) const {
    std::vector<InputPair> out;
    for (const auto& p : domain) {
        if (evaluate(p.x, p.y) == v) out.push_back(p);
    }
    return out;
}

PromiseFunction neq_function(int n) {
    if (n < 1 || n > 12) throw DomainError("NEQ input length must be in [1,12]");
    return {"neq", n, n, [](u64 x, u64 y) { return from_bit(x != y); }, all_pairs(n, n), true};
}

PromiseFunction promise_neq_function(int n, u64 seed, int samples) {
    if (n < 2 || !is_power_of_two(static_cast<u64>(n)) || n > 64) {
        throw DomainError("promise NEQ needs n a power of two in [2,64]");
    }
    PromiseFunction f;
    f.name = "promise-neq";
    f.nx = f.ny = n;
    f.evaluate = [n](u64 x, u64 y) {
        const int d = hamming_distance(x, y);
        if (d == 0) return FValue::zero;
        if (2 * d == n) return FValue::one;
        return FValue::outside;
    };
    if (n <= 8) {
        for (u64 x = 0; x < (u64{1} << n); ++x) {
            for (u64 y = 0; y < (u64{1} << n); ++y) {
                if (f.evaluate(x, y) != FValue::outside) f.domain.push_back({x, y});
            }
        }
        return f;
    }
    f.exhaustive = false;
    std::mt19937_64 rng(seed);
    std::set<InputPair> seen;
    const u64 mask = low_mask(n);
    while (static_cast<int>(seen.size()) < samples) {
        const u64 x = rng() & mask;
        const bool equal = seen.size() % 2 == 0;
        seen.insert({x, equal ? x : x ^ random_half_weight(rng, n)});
    }
    f.domain.assign(seen.begin(), seen.end());
    return f;
}

PromiseFunction and_function() {
    return {"and", 1, 1, [](u64 x, u64 y) { return from_bit(static_cast<int>(x & y & 1u)); }, all_pairs(1, 1), true};
}

PromiseFunction inner_product_function(int n) {
    if (n < 1 || n > 12) throw DomainError("inner product input length must be in [1,12]");
    return {"ip", n, n, [](u64 x, u64 y) { return from_bit(inner_product(x, y)); }, all_pairs(n, n), true};
}

PromiseFunction constant_function(int nx, int ny, FValue v) {
    return {v == FValue::one ? "const1" : "const0", nx, ny, [v](u64, u64) { return v; }, all_pairs(nx, ny), true};
}

PromiseFunction total_function(std::string name, int nx, int ny, std::function<int(u64, u64)> f) {
    return {std::move(name), nx, ny, [f = std::move(f)](u64 x, u64 y) { return from_bit(f(x, y)); }, all_pairs(nx, ny),
            true};
}

}  // namespace cdslab
