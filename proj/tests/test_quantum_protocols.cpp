#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "cdslab/classical_protocols.hpp"
#include "cdslab/error.hpp"
#include "cdslab/measures.hpp"
#include "cdslab/quantum_protocols.hpp"
#include "test_util.hpp"

using namespace cdslab;

namespace {

Eigen::Index as_index(u64 v) { return static_cast<Eigen::Index>(v); }

Matrix walsh_hadamard(u64 d) {
    Matrix h(as_index(d), as_index(d));
    for (u64 i = 0; i < d; ++i)
        for (u64 j = 0; j < d; ++j) h(as_index(i), as_index(j)) = (inner_product(i, j) ? -1.0 : 1.0) / std::sqrt(double(d));
    return h;
}

// Shortening circuit as a dense two-register statevector: Phi+, phases on
// both sides, Hadamard on both, Born probabilities indexed a * n + b.
std::vector<double> dj_statevector(const BitString& x, const BitString& y) {
    const u64 n = x.size();
    Vector v = Vector::Zero(as_index(n * n));
    for (u64 i = 0; i < n; ++i) v(as_index(i * n + i)) = (x[i] ? -1.0 : 1.0) * (y[i] ? -1.0 : 1.0) / std::sqrt(double(n));
    const Matrix h = walsh_hadamard(n);
    const Matrix hh = kron(h, h);
    const Vector out = hh * v;
    std::vector<double> p(n * n);
    for (u64 k = 0; k < n * n; ++k) p[k] = std::norm(out(as_index(k)));
    return p;
}

BitString random_bits(std::mt19937_64& rng, int n) { return bits_from_u64(rng(), n); }

}  // namespace

TEST(DjShorten, MatchesStatevectorSimulation) {
    std::mt19937_64 rng(3);
    for (int n : {2, 4, 8, 16}) {
        for (int t = 0; t < 10; ++t) {
            const auto x = random_bits(rng, n), y = random_bits(rng, n);
            const auto d = dj_shorten(x, y);
            const auto sim = dj_statevector(x, y);
            double total = 0.0;
            for (u64 a = 0; a < u64(n); ++a) {
                for (u64 b = 0; b < u64(n); ++b) {
                    EXPECT_NEAR(d.probability(a, b), sim[a * n + b], 1e-12);
                    total += d.probability(a, b);
                }
            }
            EXPECT_NEAR(total, 1.0, 1e-12);
        }
    }
}

TEST(DjShorten, Examples) {
    const auto eq = dj_shorten(bits_from_u64(0b1011, 4), bits_from_u64(0b1011, 4));
    EXPECT_DOUBLE_EQ(eq.probability_equal(), 1.0);
    for (u64 a = 0; a < 4; ++a) EXPECT_DOUBLE_EQ(eq.probability(a, a), 0.25);
    // x = 0000, y = 0011 written component 0 first.
    const auto far = dj_shorten(BitString{0, 0, 0, 0}, BitString{0, 0, 1, 1});
    EXPECT_DOUBLE_EQ(far.probability_equal(), 0.0);
    const auto two = dj_shorten(BitString{0, 1}, BitString{0, 1});
    EXPECT_DOUBLE_EQ(two.probability(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(two.probability(1, 1), 0.5);
    EXPECT_DOUBLE_EQ(two.probability(0, 1), 0.0);
    EXPECT_THROW(dj_shorten(BitString{0, 1, 1}, BitString{0, 1, 1}), DomainError);
}

TEST(DjShorten, PromiseInputsAreDecided) {
    for (int n : {2, 4, 8, 16}) {
        const auto f = promise_neq_function(n);
        for (const auto& in : f.domain) {
            const double pe = dj_shorten(bits_from_u64(in.x, n), bits_from_u64(in.y, n)).probability_equal();
            EXPECT_NEAR(pe, f(in.x, in.y) == FValue::zero ? 1.0 : 0.0, 1e-9);
        }
    }
}

TEST(NeqPromiseCds, PerfectOnPromiseAtFourBits) {
    const auto p = neq_promise_cds(4);
    const auto f = promise_neq_function(4);
    for (const auto& in : f.domain) {
        std::map<std::pair<u64, u64>, u64> h[2];
        for (u64 s = 0; s < 2; ++s) {
            for_each_transcript(p, in.x, in.y, s, [&](u64 ma, u64 mb, u64 w) {
                h[s][{ma, mb}] += w;
                if (f(in.x, in.y) == FValue::one) EXPECT_EQ(p.decode(ma, in.x, mb, in.y), s);
            });
        }
        if (f(in.x, in.y) == FValue::zero) EXPECT_EQ(h[0], h[1]);
    }
}

TEST(NeqPromiseCds, CostAtSixteen) {
    const auto c = protocol_cost(neq_promise_cds(16));
    EXPECT_EQ(c.entanglement_pairs, 4);
    // (a, inner m_A) = 4 + 5 bits from Alice, (b, inner m_B) = 4 + 4 bits from Bob.
    EXPECT_EQ(c.communication_bits, 17);
    EXPECT_EQ(c.randomness_bits, 8);
    EXPECT_EQ(c.communication_qubits, 0);
}

TEST(NeqPromiseCdqs, RecoversAndHidesAtTwoBits) {
    const auto p = neq_promise_cdqs(2);
    const auto f = promise_neq_function(2);
    std::mt19937_64 rng(8);
    const auto sigma = cdslab::testing::random_density(rng, p.secret);
    const auto tau = cdslab::testing::random_density(rng, p.secret);
    for (const auto& in : f.domain) {
        const auto n = effective_channel(p, in.x, in.y);
        const auto out = apply_channel(n, sigma);
        if (f(in.x, in.y) == FValue::one) {
            const auto back = apply_channel(*p.decoder(in.x, in.y), out);
            EXPECT_LT(cdslab::testing::max_abs(back.matrix() - sigma.matrix()), 1e-12);
        } else {
            EXPECT_LT(trace_norm(out.matrix() - apply_channel(n, tau).matrix()), 1e-12);
        }
    }
    const auto c = protocol_cost(p);
    EXPECT_EQ(c.entanglement_pairs, 1);
    EXPECT_EQ(c.randomness_bits, 4);
    EXPECT_EQ(c.communication_qubits, 1);
    EXPECT_THROW(neq_promise_cdqs(4), BudgetError);
}

TEST(BhmInstance, Examples) {
    const auto zero = bhm_instance(3, 0, 1);
    EXPECT_EQ(zero.w, matching_parity(zero));
    const auto one = bhm_instance(3, 1, 1, 3);
    EXPECT_EQ(one.w, matching_parity(one) ^ 0b111);
    const auto six = bhm_instance(6, 1, 5, 4);
    EXPECT_EQ(std::popcount(matching_parity(six) ^ six.w), 4);
    EXPECT_THROW(bhm_instance(6, 1, 5, 3), DomainError);
    EXPECT_THROW(bhm_instance(13, 0, 1), DomainError);
}

TEST(BhmInstance, GeneratedInstancesKeepThePromise) {
    for (int n : {1, 2, 3, 4, 6, 12}) {
        for (int v = 0; v < 2; ++v) {
            for (u64 seed = 0; seed < 20; ++seed) {
                const auto inst = bhm_instance(n, v, seed);
                std::set<int> used;
                for (const auto& [i, j] : inst.matching) {
                    used.insert(i);
                    used.insert(j);
                }
                EXPECT_EQ(used.size(), std::size_t(2 * n));
                const int t = std::popcount(matching_parity(inst) ^ inst.w);
                if (v == 1) {
                    EXPECT_GE(3 * t, 2 * n);
                } else {
                    EXPECT_LT(3 * t, n);
                }
            }
        }
    }
    const auto a = bhm_instance(6, 1, 42), b = bhm_instance(6, 1, 42);
    EXPECT_EQ(format_bhm_instance(a), format_bhm_instance(b));
}

TEST(BhmInstance, TextRoundTripAndErrors) {
    const auto inst = bhm_instance(6, 0, 9);
    const auto back = parse_bhm_instance(format_bhm_instance(inst));
    EXPECT_EQ(back.x, inst.x);
    EXPECT_EQ(back.w, inst.w);
    EXPECT_EQ(back.matching, inst.matching);
    EXPECT_EQ(back.promised_value, inst.promised_value);
    EXPECT_THROW(parse_bhm_instance("n: 2\nx: zz\nmatching: 0-1 2-3\nw: 0\npromised_value: 0\n"), FormatError);
    EXPECT_THROW(parse_bhm_instance("n: 2\nx: 0\n"), FormatError);
    EXPECT_THROW(parse_bhm_instance("n: 2\nx: 0\nmatching: 0-1 1-3\nw: 0\npromised_value: 0\n"), DomainError);
    EXPECT_THROW(parse_bhm_instance("n: 2\nx: 0\nmatching: 0-1 2-3\nw: 3\npromised_value: 0\n"), DomainError);
}

TEST(BhmPsqm, OutcomesMatchStatevectorSimulation) {
    for (int n : {2, 3, 4}) {
        const auto p = bhm_psqm(n);
        const u64 d = p.register_dim;
        const auto inst = bhm_instance(n, 1, 17);
        Vector v = Vector::Zero(as_index(d * d));
        for (int i = 0; i < 2 * n; ++i) v(as_index(i * d + i)) = (bit(inst.x, i) ? -1.0 : 1.0) / std::sqrt(2.0 * n);
        const Matrix hh = kron(walsh_hadamard(d), walsh_hadamard(d));
        std::map<std::tuple<int, u64, u64>, double> expected;
        for (int e = 0; e < n; ++e) {
            const auto [i, j] = inst.matching[std::size_t(e)];
            Vector proj = Vector::Zero(v.size());
            for (u64 a = 0; a < d; ++a) {
                proj(as_index(a * d + u64(i))) = v(as_index(a * d + u64(i)));
                proj(as_index(a * d + u64(j))) = v(as_index(a * d + u64(j)));
            }
            EXPECT_NEAR(proj.squaredNorm(), 1.0 / n, 1e-12);
            const Vector out = hh * proj;
            for (u64 k = 0; k < d; ++k)
                for (u64 l = 0; l < d; ++l) {
                    const double pr = std::norm(out(as_index(k * d + l)));
                    if (pr > 1e-15) expected[{e, k, l}] = pr;
                }
        }
        const auto outs = p.outcomes(inst);
        EXPECT_EQ(outs.size(), expected.size());
        u64 total = 0;
        for (const auto& o : outs) {
            total += o.weight;
            EXPECT_NEAR(double(o.weight) / double(p.outcome_denominator()), expected.at({o.edge, o.k, o.l}), 1e-12);
        }
        EXPECT_EQ(total, p.outcome_denominator());
    }
}

TEST(BhmPsqm, VoteIdentityOnEveryOutcome) {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + int(t % 5);
        const auto p = bhm_psqm(n);
        const auto inst = bhm_instance(n, t % 2, 1000 + u64(t));
        const u64 rmax = u64{1} << p.inner.randomness_bits;
        for (const auto& o : p.outcomes(inst)) {
            const auto [i, j] = inst.matching[std::size_t(o.edge)];
            const int expect = bit(inst.x, i) ^ bit(inst.x, j) ^ bit(inst.w, o.edge);
            if (n <= 3) {
                for (u64 r = 0; r < rmax; ++r) ASSERT_EQ(p.vote(inst, o, r), expect);
            } else {
                for (int s = 0; s < 4; ++s) ASSERT_EQ(p.vote(inst, o, uniform_below(rng, rmax)), expect);
            }
        }
    }
}

TEST(BhmPsqm, SingleShotSuccessEqualsAgreeingEdgeFraction) {
    for (int n : {2, 4, 6}) {
        const auto p = bhm_psqm(n);
        for (int v = 0; v < 2; ++v) {
            for (u64 seed = 0; seed < 10; ++seed) {
                const auto inst = bhm_instance(n, v, seed);
                const u64 votes = matching_parity(inst) ^ inst.w;
                const int agree = v ? std::popcount(votes) : n - std::popcount(votes);
                const double p1 = p.probability_vote_one(inst);
                EXPECT_NEAR(v ? p1 : 1.0 - p1, double(agree) / n, 1e-12);
                EXPECT_GE(v ? p1 : 1.0 - p1, 2.0 / 3.0 - 1e-12);
                std::vector<u64> per_edge(std::size_t(n), 0);
                for (const auto& o : p.outcomes(inst)) per_edge[std::size_t(o.edge)] += o.weight;
                for (u64 w : per_edge) EXPECT_EQ(w * u64(n), p.outcome_denominator());
            }
        }
    }
}

TEST(BhmPsqm, InnerMessagesDependOnlyOnVote) {
    const auto p = bhm_psqm(4);
    std::map<std::pair<u64, u64>, int> inner_inputs;
    for (int v = 0; v < 2; ++v) {
        for (u64 seed = 0; seed < 5; ++seed) {
            const auto inst = bhm_instance(4, v, seed);
            for (const auto& o : p.outcomes(inst))
                inner_inputs[{p.alice_inner_input(o.k), p.bob_inner_input(inst, o.l, o.edge)}] = p.vote(inst, o, 0);
        }
    }
    std::map<int, std::map<std::pair<u64, u64>, u64>> by_vote;
    for (const auto& [in, vote] : inner_inputs) {
        std::map<std::pair<u64, u64>, u64> h;
        for (u64 r = 0; r < (u64{1} << p.inner.randomness_bits); ++r)
            ++h[{p.inner.message_a(in.first, r), p.inner.message_b(in.second, r)}];
        if (by_vote.count(vote)) {
            EXPECT_EQ(by_vote[vote], h);
        } else {
            by_vote[vote] = h;
        }
    }
    EXPECT_EQ(by_vote.size(), 2u);
    const auto c = p.cost();
    EXPECT_EQ(c.entanglement_pairs, 3);
    EXPECT_EQ(c.communication_bits, 2 * (3 + 2 + 1));
}

TEST(Majority, SmallCases) {
    EXPECT_NEAR(majority_success(2.0 / 3.0, 1), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(majority_success(2.0 / 3.0, 3), 20.0 / 27.0, 1e-15);
    EXPECT_THROW(majority_success(0.5, 2), DomainError);
}
