#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cdslab/error.hpp"
#include "cdslab/forrelation.hpp"

using namespace cdslab;

namespace {

// O(n^2) summation with explicit Walsh-Hadamard entries.
double forr_direct(const SignVector& z) {
    const std::size_t m = z.size() / 2;
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) s += z[i] * (inner_product(i, j) ? -1.0 : 1.0) * z[m + j];
    return s / std::sqrt(double(m)) / double(z.size());
}

SignVector signs(std::mt19937_64& rng, std::size_t n) {
    SignVector v(n);
    for (auto& e : v) e = (rng() & 1) ? -1 : 1;
    return v;
}

SignVector from_bits(u64 b, int n) {
    SignVector v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[std::size_t(i)] = bit(b, i) ? -1 : 1;
    return v;
}

Matrix ch_matrix() {
    const double r = 1.0 / std::sqrt(2.0);
    Matrix m = Matrix::Identity(4, 4);
    m(2, 2) = r;
    m(2, 3) = r;
    m(3, 2) = r;
    m(3, 3) = -r;
    return m;
}

}  // namespace

TEST(ForrValue, MatchesDirectSummation) {
    std::mt19937_64 rng(1);
    for (std::size_t n : {2u, 4u, 8u, 16u, 32u, 64u}) {
        for (int t = 0; t < 20; ++t) {
            const auto z = signs(rng, n);
            EXPECT_NEAR(forr_value(z), forr_direct(z), 1e-12);
        }
    }
}

TEST(ForrValue, Examples) {
    EXPECT_NEAR(forr_value(SignVector(4, 1)), std::sqrt(2.0) / 4.0, 1e-15);
    EXPECT_NEAR(forr_value(SignVector(4, 1)), 0.35355, 1e-5);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10; ++t) {
        auto z = signs(rng, 16);
        const double f = forr_value(z);
        for (std::size_t i = 8; i < 16; ++i) z[i] = -z[i];
        EXPECT_NEAR(forr_value(z), -f, 1e-15);
    }
    EXPECT_THROW(forr_value(SignVector(6, 1)), DomainError);
    EXPECT_THROW(forr_value(SignVector{1, 0, 1, 1}), DomainError);
}

TEST(ForrValue, SignAlignmentIsMaximalAtEight) {
    for (u64 a = 0; a < 16; ++a) {
        const auto z1 = from_bits(a, 4);
        double best = -1.0;
        for (u64 b = 0; b < 16; ++b) {
            SignVector z = z1;
            const auto z2 = from_bits(b, 4);
            z.insert(z.end(), z2.begin(), z2.end());
            best = std::max(best, forr_value(z));
        }
        SignVector aligned = z1;
        for (u64 i = 0; i < 4; ++i) {
            double h = 0;
            for (u64 j = 0; j < 4; ++j) h += (inner_product(i, j) ? -1 : 1) * z1[j];
            aligned.push_back(h >= 0 ? 1 : -1);
        }
        EXPECT_NEAR(forr_value(aligned), best, 1e-15);
    }
}

TEST(ForrelationInstance, SidesAndReproducibility) {
    for (int n : {4, 8, 16, 32, 64}) {
        for (u64 seed = 0; seed < 10; ++seed) {
            const auto hi = forrelation_instance(n, ForrSide::high, seed);
            const auto lo = forrelation_instance(n, ForrSide::low, seed);
            EXPECT_GE(forr_value(pointwise_product(hi.x, hi.y)), kForrAlpha);
            EXPECT_LE(forr_value(pointwise_product(lo.x, lo.y)), kForrBeta);
        }
    }
    const auto a = forrelation_instance(16, ForrSide::low, 99), b = forrelation_instance(16, ForrSide::low, 99);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.y, b.y);
    auto c = forrelation_instance(8, ForrSide::high, 3);
    const double f = forr_value(pointwise_product(c.x, c.y));
    c.x[2] = -c.x[2];
    c.y[2] = -c.y[2];
    EXPECT_DOUBLE_EQ(forr_value(pointwise_product(c.x, c.y)), f);
    EXPECT_THROW(forrelation_instance(128, ForrSide::high, 0), DomainError);
}

TEST(ForrelationInstance, TextRoundTrip) {
    const auto inst = forrelation_instance(8, ForrSide::low, 4);
    const auto back = parse_forrelation_instance(format_forrelation_instance(inst));
    EXPECT_EQ(back.x, inst.x);
    EXPECT_EQ(back.y, inst.y);
    EXPECT_EQ(back.side, ForrSide::low);
    EXPECT_THROW(parse_forrelation_instance("# n=2 side=high\n1,-1\n1,2\n"), FormatError);
    EXPECT_THROW(parse_forrelation_instance("# n=2 side=high\n1,-1\n"), FormatError);
}

TEST(ForrelationCircuit, AcceptanceIsHalfPlusForr) {
    for (int n : {4, 8}) {
        const auto c = forrelation_circuit(n);
        const SignVector ones(std::size_t(n), 1);
        for (u64 b = 0; b < (u64{1} << n); ++b) {
            const auto z = from_bits(b, n);
            EXPECT_NEAR(acceptance_probability(c, z, ones), 0.5 + forr_value(z), 1e-12);
        }
    }
    std::mt19937_64 rng(4);
    for (int n : {16, 32, 64}) {
        const auto c = forrelation_circuit(n);
        for (int t = 0; t < 5; ++t) {
            const auto x = signs(rng, std::size_t(n)), y = signs(rng, std::size_t(n));
            EXPECT_NEAR(acceptance_probability(c, x, y), 0.5 + forr_value(pointwise_product(x, y)), 1e-12);
        }
    }
    EXPECT_NEAR(acceptance_probability(forrelation_circuit(4), SignVector(4, 1), SignVector(4, 1)),
                0.5 + std::sqrt(2.0) / 4.0, 1e-12);
}

TEST(ForrelationCircuit, SimulationMatchesDenseUnitary) {
    std::mt19937_64 rng(6);
    for (int n : {4, 8, 16, 32}) {
        const auto c = forrelation_circuit(n);
        const auto x = signs(rng, std::size_t(n)), y = signs(rng, std::size_t(n));
        const Matrix u = circuit_unitary(c, x, y);
        const Eigen::Index d = u.rows();
        EXPECT_LT((u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-9);
        const Vector v = simulate_circuit(c, x, y);
        EXPECT_LT((u.col(0) - v).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(u.col(0).head(d / 2).squaredNorm(), acceptance_probability(c, x, y), 1e-12);
    }
}

TEST(CompileCliffordT, ControlledHadamardDecomposition) {
    Circuit ch{2, {{GateKind::CH, {0, 1}}}};
    const auto compiled = compile_clifford_t(ch);
    ASSERT_EQ(compiled.gates.size(), 7u);
    const GateKind expect[] = {GateKind::P,   GateKind::H, GateKind::T,  GateKind::CNOT,
                               GateKind::Tdg, GateKind::H, GateKind::Pdg};
    for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(compiled.gates[i].kind, expect[i]);
    const Matrix u = circuit_unitary(compiled, {}, {});
    EXPECT_LT((u - ch_matrix()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((circuit_unitary(ch, {}, {}) - ch_matrix()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(t_depth(compiled), 2);
}

TEST(CompileCliffordT, PreservesForrelationCircuits) {
    Circuit plain{3, {{GateKind::H, {0}}, {GateKind::CNOT, {0, 2}}, {GateKind::X, {1}}}};
    EXPECT_EQ(compile_clifford_t(plain), plain);
    EXPECT_EQ(t_depth(plain), 0);
    std::mt19937_64 rng(8);
    for (int n : {4, 8, 16, 32}) {
        const auto c = forrelation_circuit(n);
        const auto x = signs(rng, std::size_t(n)), y = signs(rng, std::size_t(n));
        const auto compiled = compile_clifford_t(c);
        for (const auto& g : compiled.gates) EXPECT_NE(g.kind, GateKind::CH);
        EXPECT_LT((circuit_unitary(compiled, x, y) - circuit_unitary(c, x, y)).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(TDepth, ConstantAcrossSizes) {
    const int base = t_depth(compile_clifford_t(forrelation_circuit(4)));
    EXPECT_EQ(base, 2);
    for (int n : {8, 16, 32}) EXPECT_EQ(t_depth(compile_clifford_t(forrelation_circuit(n))), base) << n;
    EXPECT_THROW(t_depth(forrelation_circuit(8)), DomainError);
}

TEST(Schedule, LayersRespectWires) {
    const auto c = forrelation_circuit(8);
    const auto layers = schedule_layers(c);
    std::size_t total = 0;
    for (const auto& layer : layers) {
        std::vector<int> used;
        for (auto g : layer)
            for (int w : c.gates[g].wires) {
                EXPECT_EQ(std::count(used.begin(), used.end(), w), 0);
                used.push_back(w);
            }
        total += layer.size();
    }
    EXPECT_EQ(total, c.gates.size());
}

TEST(CircuitText, RoundTripAndErrors) {
    const auto c = compile_clifford_t(forrelation_circuit(8));
    EXPECT_EQ(parse_circuit(format_circuit(c)), c);
    EXPECT_THROW(parse_circuit("wires 2\nFOO 0\n"), FormatError);
    EXPECT_THROW(parse_circuit("H 0\n"), FormatError);
    EXPECT_THROW(parse_circuit("wires 2\nCNOT 0 5\n"), FormatError);
    EXPECT_THROW(parse_circuit("wires 2\nMEASURE 0\nH 0\n"), FormatError);
}

TEST(ForrelationDecision, HighSideFifteenReps) {
    std::mt19937_64 rng(12345);
    int correct = 0;
    for (int i = 0; i < 200; ++i) {
        const auto inst = forrelation_instance(4 << (i % 5), ForrSide::high, derive_seed(77, u64(i)));
        if (forrelation_decision(inst.x, inst.y, 15, rng) == -1) ++correct;
    }
    EXPECT_GE(correct / 200.0, 0.91);
    EXPECT_THROW(forrelation_decision(SignVector(4, 1), SignVector(4, 1), 0, rng), DomainError);
}

TEST(ForrelationDecision, SingleShotLowSideIsHalfMinusForr) {
    for (u64 seed = 0; seed < 20; ++seed) {
        const auto inst = forrelation_instance(16, ForrSide::low, seed);
        EXPECT_NEAR(decision_success_probability(inst, 1), 0.5 - forr_value(pointwise_product(inst.x, inst.y)), 1e-12);
    }
}

TEST(ForrelationCalibration, LinearRelationIsExact) {
    const auto cal = calibrate_forrelation(5, 10, 15);
    ASSERT_EQ(cal.fits.size(), 2u);
    for (const auto& f : cal.fits) {
        EXPECT_NEAR(f.slope, 1.0, 1e-12);
        EXPECT_NEAR(f.intercept, 0.5, 1e-12);
        EXPECT_LT(f.max_residual, 1e-12);
    }
    EXPECT_LE(cal.decision_error_high, 0.09);
    EXPECT_LE(cal.decision_error_low, 0.09);
}
