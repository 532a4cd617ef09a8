#include <gtest/gtest.h>

#include <random>

#include "cdslab/cdqs.hpp"
#include "cdslab/classical_protocols.hpp"
#include "cdslab/error.hpp"
#include "cdslab/lp.hpp"
#include "cdslab/measures.hpp"
#include "cdslab/quantum_protocols.hpp"
#include "cdslab/report_json.hpp"
#include "cdslab/verifier.hpp"
#include "test_util.hpp"

using namespace cdslab;

namespace {

using Sense = LinearConstraint::Sense;

LinearConstraint row(std::vector<std::pair<int, double>> terms, Sense s, double rhs) {
    LinearConstraint c;
    c.terms = std::move(terms);
    c.sense = s;
    c.rhs = rhs;
    return c;
}

// m_A = (x, s) in the clear.
CdsProtocol leak_cds(u64 alphabet) {
    CdsProtocol p;
    p.name = "leak";
    p.nx = p.ny = 1;
    p.secret_alphabet = alphabet;
    p.message_a_bits = 3;
    p.message_b_bits = 1;
    p.message_a = [](u64, u64 s, u64) { return s; };
    p.message_b = [](u64 y, u64) { return y; };
    p.decode = [](u64 ma, u64, u64, u64) { return ma; };
    return p;
}

PsmProtocol echo_psm(int n) {
    PsmProtocol p;
    p.name = "echo";
    p.nx = p.ny = n;
    p.message_a_bits = n;
    p.message_b_bits = n;
    p.message_a = [](u64 x, u64) { return x; };
    p.message_b = [](u64 y, u64) { return y; };
    p.decode = [](u64 a, u64 b) { return static_cast<u64>(inner_product(a, b)); };
    return p;
}

PsmProtocol constant_psm() {
    PsmProtocol p;
    p.name = "constant";
    p.nx = p.ny = 2;
    p.randomness_bits = 2;
    p.message_a_bits = 2;
    p.message_b_bits = 1;
    p.message_a = [](u64, u64 r) { return r; };
    p.message_b = [](u64, u64) { return u64{0}; };
    p.decode = [](u64, u64) { return u64{1}; };
    return p;
}

double depolarized_phi_distance(double p) {
    // (1-p) Phi + p I/4 - Phi = -p (Phi - I/4); Phi - I/4 has spectrum {3/4, -1/4 x3}.
    return p * 1.5;
}

}  // namespace

TEST(LinearProgram, TextbookOptimum) {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {-1.0, -1.0};
    lp.constraints = {row({{0, 1.0}, {1, 2.0}}, Sense::le, 4.0), row({{0, 3.0}, {1, 1.0}}, Sense::le, 6.0)};
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpSolution::Status::optimal);
    EXPECT_NEAR(s.value, -2.8, 1e-12);
    EXPECT_NEAR(s.x[0], 1.6, 1e-12);
    EXPECT_NEAR(s.x[1], 1.2, 1e-12);
}

TEST(LinearProgram, EqualityAndGreaterRows) {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {1.0, 2.0};
    lp.constraints = {row({{0, 1.0}, {1, 1.0}}, Sense::eq, 3.0), row({{0, 1.0}, {1, -1.0}}, Sense::ge, 1.0),
                      row({{0, 1.0}}, Sense::le, 2.5)};
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpSolution::Status::optimal);
    EXPECT_NEAR(s.x[0], 2.5, 1e-12);
    EXPECT_NEAR(s.value, 3.5, 1e-12);
}

TEST(LinearProgram, NegativeRightHandSide) {
    LinearProgram lp;
    lp.num_vars = 1;
    lp.objective = {1.0};
    lp.constraints = {row({{0, -1.0}}, Sense::le, -2.0)};
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpSolution::Status::optimal);
    EXPECT_NEAR(s.value, 2.0, 1e-12);
}

TEST(LinearProgram, InfeasibleAndUnbounded) {
    LinearProgram a;
    a.num_vars = 1;
    a.objective = {1.0};
    a.constraints = {row({{0, 1.0}}, Sense::ge, 2.0), row({{0, 1.0}}, Sense::le, 1.0)};
    EXPECT_EQ(solve_lp(a).status, LpSolution::Status::infeasible);
    LinearProgram b;
    b.num_vars = 2;
    b.objective = {-1.0, 0.0};
    b.constraints = {row({{0, 1.0}, {1, -1.0}}, Sense::le, 1.0)};
    EXPECT_EQ(solve_lp(b).status, LpSolution::Status::unbounded);
}

TEST(Chebyshev, PointMassesGiveUniformCenter) {
    for (std::size_t k = 2; k <= 5; ++k) {
        std::vector<std::vector<u64>> rows(k, std::vector<u64>(k, 0));
        for (std::size_t i = 0; i < k; ++i) rows[i][i] = 1;
        const auto c = l1_chebyshev_center(rows, 1, true);
        EXPECT_NEAR(c.radius, 2.0 * (1.0 - 1.0 / static_cast<double>(k)), 1e-12);
        for (double v : c.center) EXPECT_NEAR(v, 1.0 / static_cast<double>(k), 1e-12);
    }
}

TEST(Chebyshev, MidpointMatchesLinearProgram) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const u64 denom = 64;
        std::vector<std::vector<u64>> rows(2, std::vector<u64>(6, 0));
        for (auto& r : rows) {
            for (u64 i = 0; i < denom; ++i) ++r[uniform_below(rng, 6)];
        }
        const auto mid = l1_chebyshev_center(rows, denom, false);
        const auto lp = l1_chebyshev_center(rows, denom, true);
        double half_l1 = 0.0;
        for (std::size_t j = 0; j < 6; ++j) {
            half_l1 += std::abs(static_cast<double>(rows[0][j]) - static_cast<double>(rows[1][j]));
        }
        half_l1 /= 2.0 * static_cast<double>(denom);
        EXPECT_NEAR(mid.radius, half_l1, 1e-12);
        EXPECT_NEAR(lp.radius, half_l1, 1e-9);
    }
}

TEST(Chebyshev, ProportionalColumnsLumpWithoutChangingRadius) {
    // Columns 0 and 1 have proportional profiles (1:2 and 2:4).
    const std::vector<std::vector<u64>> rows = {{1, 2, 5, 0}, {2, 4, 0, 2}, {0, 0, 4, 4}};
    const auto c = l1_chebyshev_center(rows, 8, true);
    double brute = 10.0;
    // Grid search over the 4-simplex in steps of 1/48 as an independent oracle.
    const int steps = 48;
    for (int a = 0; a <= steps; ++a)
        for (int b = 0; a + b <= steps; ++b)
            for (int d = 0; a + b + d <= steps; ++d) {
                const double s[4] = {a / 48.0, b / 48.0, d / 48.0, (steps - a - b - d) / 48.0};
                double worst = 0.0;
                for (const auto& r : rows) {
                    double l = 0.0;
                    for (int j = 0; j < 4; ++j) l += std::abs(s[j] - static_cast<double>(r[static_cast<std::size_t>(j)]) / 8.0);
                    worst = std::max(worst, l);
                }
                brute = std::min(brute, worst);
            }
    EXPECT_LE(c.radius, brute + 1e-9);
    EXPECT_GE(c.radius, brute - 0.1);
    double mass = 0.0;
    for (double v : c.center) mass += v;
    EXPECT_NEAR(mass, 1.0, 1e-9);
}

TEST(CdsVerify, NeqIsPerfect) {
    for (int n = 1; n <= 3; ++n) {
        const auto r = cds_verify(neq_cds(n), neq_function(n));
        EXPECT_EQ(r.epsilon_hat, 0.0);
        EXPECT_NEAR(r.delta_hat_upper, 0.0, 1e-12);
        EXPECT_EQ(r.inputs.size(), std::size_t{1} << (2 * n));
    }
}

TEST(CdsVerify, AndIsPerfect) {
    const auto r = cds_verify(and_cds(), and_function());
    EXPECT_EQ(r.epsilon_hat, 0.0);
    EXPECT_EQ(r.delta_hat_upper, 0.0);
}

TEST(CdsVerify, ClearSecretHasDistanceOne) {
    const auto f = constant_function(1, 1, FValue::zero);
    const auto r = cds_verify(leak_cds(2), f);
    EXPECT_NEAR(r.delta_hat_upper, 1.0, 1e-12);
    const auto lp = cds_verify(leak_cds(2), f, VerifyOptions{1, true});
    EXPECT_NEAR(lp.delta_hat_upper, 1.0, 1e-9);
    // Four point masses: uniform simulator at distance 3/2.
    const auto r4 = cds_verify(leak_cds(4), f);
    EXPECT_NEAR(r4.delta_hat_upper, 1.5, 1e-9);
}

TEST(CdsVerify, ClearSecretIsCorrect) {
    const auto r = cds_verify(leak_cds(4), constant_function(1, 1, FValue::one));
    EXPECT_EQ(r.epsilon_hat, 0.0);
}

TEST(CdsVerify, LargerAlphabetThroughLinearProgram) {
    const auto r = cds_verify(parallel_extend(neq_cds(2), 2), neq_function(2));
    EXPECT_EQ(r.epsilon_hat, 0.0);
    EXPECT_NEAR(r.delta_hat_upper, 0.0, 1e-9);
}

TEST(CdsVerify, HybridPromiseNeq) {
    const auto r = cds_verify(neq_promise_cds(4), promise_neq_function(4));
    EXPECT_EQ(r.epsilon_hat, 0.0);
    EXPECT_LE(r.delta_hat_upper, 1e-9);
}

TEST(CdsVerify, BudgetGuard) {
    CdsProtocol p = and_cds();
    p.randomness_bits = 30;
    EXPECT_THROW(cds_verify(p, and_function()), BudgetError);
}

TEST(CdsVerify, WorkersDoNotChangeTheReport) {
    const auto a = cds_verify(neq_cds(3), neq_function(3), VerifyOptions{1, false});
    const auto b = cds_verify(neq_cds(3), neq_function(3), VerifyOptions{3, false});
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(PsmVerify, InnerProductIsPerfect) {
    for (int n = 1; n <= 3; ++n) {
        const auto r = psm_verify(ip_psm(n), inner_product_function(n));
        EXPECT_EQ(r.epsilon_hat, 0.0);
        EXPECT_NEAR(r.delta_hat_upper, 0.0, 1e-12);
        const auto lp = psm_verify(ip_psm(n), inner_product_function(n), VerifyOptions{1, true});
        EXPECT_NEAR(lp.delta_hat_upper, 0.0, 1e-9);
    }
}

TEST(PsmVerify, EchoLeaksWithinAClass) {
    // Value-zero class of IP_2 has message pairs (x,y) ranging over 10
    // distinct point masses, value-one over 6; uniform centers are optimal.
    const auto r = psm_verify(echo_psm(2), inner_product_function(2));
    EXPECT_EQ(r.epsilon_hat, 0.0);
    EXPECT_NEAR(r.delta_hat_upper, 2.0 * (1.0 - 1.0 / 10.0), 1e-9);
    for (const auto& d : r.inputs) {
        EXPECT_NEAR(d.security, d.value == FValue::zero ? 1.8 : 2.0 * (1.0 - 1.0 / 6.0), 1e-9);
    }
}

TEST(PsmVerify, ConstantMessages) {
    const auto r = psm_verify(constant_psm(), constant_function(2, 2, FValue::one));
    EXPECT_EQ(r.epsilon_hat, 0.0);
    EXPECT_EQ(r.delta_hat_upper, 0.0);
}

TEST(CdqsVerify, ForwardingDecodesTrivially) {
    const auto r = cdqs_verify(forwarding_cdqs(), constant_function(1, 1, FValue::one));
    EXPECT_NEAR(r.epsilon_hat, 0.0, 1e-12);
    EXPECT_NEAR(r.epsilon_upper, 0.0, 1e-12);
}

TEST(CdqsVerify, ForwardingIsInsecure) {
    const auto r = cdqs_verify(forwarding_cdqs(), constant_function(1, 1, FValue::zero));
    // ||Phi - I/4||_1 from the spectrum {3/4, -1/4, -1/4, -1/4}.
    EXPECT_NEAR(r.delta_hat_lower, 1.5, 1e-12);
    EXPECT_NEAR(r.delta_hat_upper, 2.0, 1e-12);
    ASSERT_TRUE(r.inputs[0].pauli_spread.has_value());
    EXPECT_NEAR(*r.inputs[0].pauli_spread, 1.0, 1e-12);
}

TEST(CdqsVerify, LiftedNeqIsPerfect) {
    const auto r = cdqs_verify(lifted_neq_cdqs(), neq_function(1));
    EXPECT_NEAR(r.epsilon_hat, 0.0, 1e-9);
    EXPECT_NEAR(r.delta_hat_lower, 0.0, 1e-9);
    EXPECT_NEAR(r.delta_hat_upper, 0.0, 1e-9);
    for (const auto& d : r.inputs) {
        if (d.value == FValue::zero) {
            ASSERT_TRUE(d.pauli_spread.has_value());
            EXPECT_NEAR(*d.pauli_spread, 0.0, 1e-9);
        }
    }
}

TEST(CdqsVerify, AndKeyAndLeakyVariant) {
    const auto r = cdqs_verify(and_key_cdqs(), and_function());
    EXPECT_NEAR(r.epsilon_hat, 0.0, 1e-9);
    EXPECT_NEAR(r.delta_hat_upper, 0.0, 1e-9);
    for (double leak : {0.1, 0.2, 0.5}) {
        const auto l = cdqs_verify(leaky_and_key_cdqs(leak), and_function());
        // Leaked branch contributes leak * ||Phi - pi (x) pi||_1.
        EXPECT_NEAR(l.delta_hat_lower, 1.5 * leak, 1e-9);
        EXPECT_NEAR(l.epsilon_hat, 0.0, 1e-9);
    }
}

TEST(CdqsVerify, HybridAtTwo) {
    const auto r = cdqs_verify(neq_promise_cdqs(2), promise_neq_function(2));
    EXPECT_NEAR(r.epsilon_hat, 0.0, 1e-9);
    EXPECT_NEAR(r.delta_hat_upper, 0.0, 1e-9);
}

TEST(Productness, PerfectProtocol) {
    const auto p = lifted_neq_cdqs();
    const auto entries = productness_check(p, neq_function(1));
    ASSERT_EQ(entries.size(), 4u);
    for (const auto& e : entries) {
        if (e.value == FValue::zero) {
            EXPECT_NEAR(e.product_distance, 0.0, 1e-9);
            EXPECT_FALSE(e.entanglement_fidelity.has_value());
        } else {
            ASSERT_TRUE(e.entanglement_fidelity.has_value());
            EXPECT_NEAR(*e.entanglement_fidelity, 1.0, 1e-9);
            EXPECT_GE(e.product_distance, entangled_separation_bound(p.d_q(), 0.0) - 1e-9);
        }
    }
}

TEST(Productness, DepolarizedSecretDegradesContinuously) {
    const Layout q{{"Q", 2}};
    double last_fid = 1.0;
    for (double p : {0.05, 0.1, 0.3}) {
        const auto noisy = with_secret_noise(lifted_neq_cdqs(), QuantumChannel::depolarizing(q, p), "dep");
        const auto rep = cdqs_verify(noisy, neq_function(1));
        const auto entries = productness_check(noisy, neq_function(1));
        for (const auto& e : entries) {
            if (e.value == FValue::zero) {
                EXPECT_NEAR(e.product_distance, 0.0, 1e-9);
                EXPECT_LE(e.product_distance, rep.delta_hat_upper + 1e-9);
            } else {
                // (1-p) Phi + p I/4 overlaps Phi with 1 - 3p/4.
                EXPECT_NEAR(*e.entanglement_fidelity, 1.0 - 0.75 * p, 1e-9);
                EXPECT_GE(*e.entanglement_fidelity, 1.0 - rep.epsilon_hat - 1e-9);
                EXPECT_LT(*e.entanglement_fidelity, last_fid);
            }
        }
        EXPECT_NEAR(rep.epsilon_hat, depolarized_phi_distance(p), 1e-9);
        last_fid = 1.0 - 0.75 * p;
    }
}

TEST(Productness, DistancesBelowSecurityBound) {
    for (double leak : {0.0, 0.25, 0.75}) {
        const auto p = leaky_and_key_cdqs(leak);
        const auto rep = cdqs_verify(p, and_function());
        for (const auto& e : productness_check(p, and_function())) {
            if (e.value == FValue::zero) EXPECT_LE(e.product_distance, rep.delta_hat_upper + 1e-9);
            else EXPECT_GE(*e.entanglement_fidelity, 1.0 - rep.epsilon_hat - 1e-9);
        }
    }
}

TEST(BlockwiseTraceNorm, AgreesWithFullNorm) {
    std::mt19937_64 rng(3);
    const Layout l{{"C", 3}, {"A", 2}};
    Matrix m = Matrix::Zero(6, 6);
    for (int b = 0; b < 3; ++b) {
        const Matrix g = cdslab::testing::ginibre(rng, 2, 2);
        m.block(2 * b, 2 * b, 2, 2) = g + g.adjoint();
    }
    EXPECT_NEAR(blockwise_trace_norm(m, l, {"C"}), trace_norm(m), 1e-10);
    const Matrix g = cdslab::testing::ginibre(rng, 6, 6);
    const Matrix h = g + g.adjoint();
    EXPECT_NEAR(blockwise_trace_norm(h, l, {"C"}), trace_norm(h), 1e-10);
    // Classical register listed second in the layout.
    const Layout l2{{"A", 2}, {"C", 3}};
    const Matrix m2 = reorder(m, l, {"A", "C"});
    EXPECT_NEAR(blockwise_trace_norm(m2, l2, {"C"}), trace_norm(m), 1e-10);
}

TEST(ReportJson, FieldNames) {
    const auto j = to_json(cds_verify(and_cds(), and_function()));
    for (const char* k : {"protocol", "n", "epsilon_hat", "delta_hat_lower", "delta_hat_upper", "inputs", "cost",
                          "seed", "wall_time_ms"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_TRUE(j["wall_time_ms"].is_null());
    EXPECT_EQ(j["inputs"].size(), 4u);
    EXPECT_EQ(j["cost"]["randomness_bits"], 1);
}
