#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cdslab/bits.hpp"
#include "cdslab/linalg.hpp"

namespace cdslab {

/// Entries are +1 or -1.
using SignVector = std::vector<int>;

/// (1/n) <z1| H |z2> with z1, z2 the halves of z and H the orthonormal
/// Walsh-Hadamard transform on n/2 entries. Throws DomainError unless n is a
/// power of 2 with n >= 2 and every entry is +-1.
double forr_value(const SignVector& z);

SignVector pointwise_product(const SignVector& x, const SignVector& y);

/// Promise thresholds, confirmed by calibrate_forrelation.
inline constexpr double kForrAlpha = 0.3;
inline constexpr double kForrBeta = 0.05;

enum class ForrSide { high, low };

struct ForrelationInstance {
    SignVector x;
    SignVector y;
    ForrSide side = ForrSide::high;
    double alpha = kForrAlpha;
    double beta = kForrBeta;
};

inline constexpr int kForrResampleBudget = 1000;

/// High side: z2 = sign(H z1) (sign 0 = +1), resampled until forr >= alpha;
/// low side: uniform z until forr <= beta. Then x is uniform and y = z.x.
/// 4 <= n <= 64. Throws BudgetError after 1000 failed draws.
ForrelationInstance forrelation_instance(int n, ForrSide side, u64 seed);

/// Two rows of comma-separated +-1 values (x then y) after a header line.
std::string format_forrelation_instance(const ForrelationInstance& inst);
ForrelationInstance parse_forrelation_instance(const std::string& text);

enum class GateKind { H, X, CNOT, CH, T, Tdg, P, Pdg, Oracle, Measure };

struct Gate {
    GateKind kind = GateKind::H;
    /// Control first for CNOT and CH; the register (most significant wire
    /// first) for Oracle.
    std::vector<int> wires;
    /// Oracle only: 0 applies Alice's phases, 1 Bob's.
    int oracle = 0;

    friend bool operator==(const Gate&, const Gate&) = default;
};

struct Circuit {
    int wire_count = 0;
    std::vector<Gate> gates;

    friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// Throws DomainError on out-of-range or repeated wires, or gates after a
/// measurement on the same wire.
void validate_circuit(const Circuit& c);

/// Wires 0..k-1 hold Alice's register (wire 0 is the control), wires k..2k-1
/// Bob's, k = log n. H on Alice's wires, E (CNOT i -> k+i), the phase
/// oracles, E again, X on the control, controlled-H from the control onto
/// wires 1..k-1, H and measurement on the control.
Circuit forrelation_circuit(int n);

/// Replaces every controlled-H by P, H, T, CNOT, T-dagger, H, P-dagger on the
/// target. Oracle gates are kept: they prepare the input state.
Circuit compile_clifford_t(const Circuit& c);

/// ASAP layers: each gate goes one layer after the latest gate sharing a wire.
std::vector<std::vector<std::size_t>> schedule_layers(const Circuit& c);

/// Number of T layers: per-wire T counts propagated through shared gates.
/// Oracle gates count 0. Throws DomainError on a controlled-H.
int t_depth(const Circuit& c);

/// Oracle phases bind to x (oracle 0) and y (oracle 1); the register index
/// reads the oracle wires most significant first.
Vector simulate_circuit(const Circuit& c, const SignVector& x, const SignVector& y);

/// Dense unitary of the non-measurement gates; wire 0 is the most
/// significant bit of the basis index. Throws BudgetError above 12 wires.
Matrix circuit_unitary(const Circuit& c, const SignVector& x, const SignVector& y);

/// Probability that the control wire (wire 0) reads 0.
double acceptance_probability(const Circuit& c, const SignVector& x, const SignVector& y);

/// Majority over `reps` simulated shots: -1 when the fraction of 0 outcomes
/// reaches 1/2 + (alpha + beta)/2, else +1. Throws DomainError for reps < 1.
int forrelation_decision(const SignVector& x, const SignVector& y, int reps, std::mt19937_64& rng);

/// Exact probability that forrelation_decision returns the promised value.
double decision_success_probability(const ForrelationInstance& inst, int reps);

struct ForrelationCalibration {
    struct Fit {
        int n = 0;
        double slope = 0.0;
        double intercept = 0.0;
        double max_residual = 0.0;
        std::size_t points = 0;
    };
    std::vector<Fit> fits;
    double alpha = kForrAlpha;
    double beta = kForrBeta;
    int reps = 15;
    /// Mean single-shot error of the generated instances per side.
    double single_shot_error_high = 0.0;
    double single_shot_error_low = 0.0;
    /// Mean exact error of the `reps`-shot decision per side.
    double decision_error_high = 0.0;
    double decision_error_low = 0.0;
};

/// Least-squares fit of acceptance probability against forr over every
/// z in {+-1}^n for n in {4, 8}, then the generator sweep at `reps`.
ForrelationCalibration calibrate_forrelation(u64 seed, int instances_per_side = 100, int reps = 15);

std::string format_calibration(const ForrelationCalibration& cal);

std::string format_circuit(const Circuit& c);
/// Throws FormatError with the line number on malformed input.
Circuit parse_circuit(const std::string& text);

}  // namespace cdslab
