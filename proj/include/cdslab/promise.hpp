#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cdslab/bits.hpp"

namespace cdslab {

enum class FValue { zero, one, outside };

struct InputPair {
    u64 x = 0;
    u64 y = 0;
    friend bool operator==(const InputPair&, const InputPair&) = default;
    friend auto operator<=>(const InputPair&, const InputPair&) = default;
};

/// Partial Boolean function together with the promise inputs used for
/// verification: every promise input when that is feasible, otherwise a
/// seeded sample (see `exhaustive`).
struct PromiseFunction {
    std::string name;
    int nx = 0;
    int ny = 0;
    std::function<FValue(u64, u64)> evaluate;
    std::vector<InputPair> domain;
    bool exhaustive = true;

    FValue operator()(u64 x, u64 y) const { return evaluate(x, y); }
    std::vector<InputPair> inputs_with(FValue v) const;
};

/// f(x,y) = [x != y] on n-bit strings, all pairs.
PromiseFunction neq_function(int n);
/// x = y (value 0) or Hamming distance n/2 (value 1). Exhaustive for n <= 8,
/// otherwise `samples` seeded pairs split evenly between the two classes.
PromiseFunction promise_neq_function(int n, u64 seed = 1, int samples = 256);
PromiseFunction and_function();
/// <x,y> mod 2 on n-bit strings.
PromiseFunction inner_product_function(int n);
PromiseFunction constant_function(int nx, int ny, FValue v);
/// Total function on all pairs from an arbitrary predicate.
PromiseFunction total_function(std::string name, int nx, int ny, std::function<int(u64, u64)> f);

}  // namespace cdslab
