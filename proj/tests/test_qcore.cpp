#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cdslab/channel.hpp"
#include "cdslab/decoder.hpp"
#include "cdslab/error.hpp"
#include "cdslab/matrix_io.hpp"
#include "cdslab/measures.hpp"
#include "cdslab/states.hpp"
#include "test_util.hpp"

using namespace cdslab;
using namespace cdslab::testing;

namespace {

const Layout kQubitA{{"A", 2}};
const Layout kQubitB{{"B", 2}};

StateVector ket(const Layout& l, std::initializer_list<cplx> amps) {
    Vector v(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (auto a : amps) v(i++) = a;
    return StateVector::normalized(v, l);
}

DensityMatrix projector(const Layout& l, std::initializer_list<cplx> amps) { return DensityMatrix::pure(ket(l, amps)); }

Matrix pauli_x() {
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

// Row-major vec(K rho K^dagger) = (K (x) conj K) vec(rho).
Matrix superoperator(const QuantumChannel& n) {
    const auto di = static_cast<Eigen::Index>(n.input_dim());
    const auto dout = static_cast<Eigen::Index>(n.output_dim());
    Matrix s = Matrix::Zero(dout * dout, di * di);
    for (const auto& k : n.kraus()) s += kron(k, Matrix(k.conjugate()));
    return s;
}

Matrix apply_superoperator(const Matrix& s, const Matrix& rho) {
    const auto di = rho.rows();
    Vector v(di * di);
    for (Eigen::Index i = 0; i < di; ++i)
        for (Eigen::Index j = 0; j < di; ++j) v(i * di + j) = rho(i, j);
    const Vector w = s * v;
    const auto dout = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(w.size()))));
    Matrix out(dout, dout);
    for (Eigen::Index i = 0; i < dout; ++i)
        for (Eigen::Index j = 0; j < dout; ++j) out(i, j) = w(i * dout + j);
    return out;
}

}  // namespace

TEST(Tensor, BasisKetsOrderSecondSystemFastest) {
    const auto t = tensor(StateVector::basis(kQubitA, 0), StateVector::basis(kQubitB, 1));
    Vector want = Vector::Zero(4);
    want(1) = 1.0;
    EXPECT_LE(max_abs(t.amplitudes() - want), 1e-15);
    EXPECT_EQ(t.layout().names(), (std::vector<std::string>{"A", "B"}));
}

TEST(Tensor, MaximallyMixedProduct) {
    const auto t = tensor(DensityMatrix::maximally_mixed(kQubitA), DensityMatrix::maximally_mixed(kQubitB));
    EXPECT_LE(max_abs(t.matrix() - Matrix::Identity(4, 4) / 4.0), 1e-15);
}

TEST(Tensor, PlusPlusIsUniform) {
    const auto t = tensor(ket(kQubitA, {1, 1}), ket(kQubitB, {1, 1}));
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(t.amplitudes()(i) - 0.5), 0.0, 1e-15);
}

TEST(Tensor, NameCollisionThrows) {
    EXPECT_THROW(tensor(StateVector::basis(kQubitA, 0), StateVector::basis(kQubitA, 0)), LayoutError);
}

TEST(States, InvalidInputsRejected) {
    Matrix m = Matrix::Identity(2, 2);
    EXPECT_THROW(DensityMatrix(m, kQubitA), DomainError);  // trace 2
    Matrix neg(2, 2);
    neg << 1.5, 0, 0, -0.5;
    EXPECT_THROW(DensityMatrix(neg, kQubitA), DomainError);
    Matrix nh(2, 2);
    nh << 0.5, 0.3, 0.0, 0.5;
    EXPECT_THROW(DensityMatrix(nh, kQubitA), DomainError);
    EXPECT_THROW(DensityMatrix(Matrix::Identity(4, 4) / 4.0, kQubitA), LayoutError);
    Vector v = Vector::Ones(2);
    EXPECT_THROW(StateVector(v, kQubitA), DomainError);
}

TEST(PartialTrace, MaximallyEntangledMarginal) {
    const auto phi = DensityMatrix::pure(maximally_entangled("Q", "Qbar", 2));
    const auto r = partial_trace(phi, {"Q"});
    EXPECT_LE(max_abs(r.matrix() - Matrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, ProductState) {
    const auto s = DensityMatrix::pure(tensor(StateVector::basis(kQubitA, 0), StateVector::basis(kQubitB, 1)));
    const auto r = partial_trace(s, {"A"});
    Matrix want = Matrix::Zero(2, 2);
    want(0, 0) = 1.0;
    EXPECT_LE(max_abs(r.matrix() - want), 1e-15);
    const auto rb = partial_trace(s, {"B"});
    want.setZero();
    want(1, 1) = 1.0;
    EXPECT_LE(max_abs(rb.matrix() - want), 1e-15);
}

TEST(PartialTrace, SchmidtCoefficientsMatchSvd) {
    std::mt19937_64 rng(11);
    const Layout l{{"A", 2}, {"B", 2}};
    for (int t = 0; t < 20; ++t) {
        const auto psi = random_pure(rng, l);
        Matrix m(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m(i, j) = psi.amplitudes()(2 * i + j);
        Eigen::JacobiSVD<Matrix> svd(m);
        RealVector want = svd.singularValues().array().square();
        std::sort(want.data(), want.data() + want.size());
        const auto r = partial_trace(DensityMatrix::pure(psi), {"A"});
        const auto got = hermitian_eig(r.matrix()).values;
        EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12);
        const auto rv = partial_trace(psi, {"A"});
        EXPECT_LE(max_abs(rv.matrix() - r.matrix()), 1e-14);
    }
}

TEST(PartialTrace, ThreePartyMatchesExplicitSum) {
    std::mt19937_64 rng(12);
    const Layout l{{"A", 2}, {"B", 3}, {"C", 2}};
    const auto rho = random_density(rng, l);
    const auto r = partial_trace(rho, {"C", "A"});
    EXPECT_EQ(r.layout().names(), (std::vector<std::string>{"A", "C"}));
    Matrix want = Matrix::Zero(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int c2 = 0; c2 < 2; ++c2)
                    for (int b = 0; b < 3; ++b)
                        want(a * 2 + c, a2 * 2 + c2) += rho.matrix()(a * 6 + b * 2 + c, a2 * 6 + b * 2 + c2);
    EXPECT_LE(max_abs(r.matrix() - want), 1e-14);
    EXPECT_NEAR(r.matrix().trace().real(), 1.0, 1e-12);
}

TEST(PartialTrace, EmptyKeepThrows) {
    EXPECT_THROW(partial_trace(DensityMatrix::maximally_mixed(kQubitA), {}), LayoutError);
    EXPECT_THROW(partial_trace(DensityMatrix::maximally_mixed(kQubitA), {"Z"}), LayoutError);
}

TEST(TraceNorm, Examples) {
    const auto p0 = projector(kQubitA, {1, 0});
    const auto p1 = projector(kQubitA, {0, 1});
    const auto plus = projector(kQubitA, {1, 1});
    EXPECT_NEAR(trace_norm(p0.matrix() - p1.matrix()), 2.0, 1e-12);
    EXPECT_NEAR(trace_norm(p0.matrix() - p0.matrix()), 0.0, 1e-15);
    EXPECT_NEAR(trace_norm(p0.matrix() - plus.matrix()), std::sqrt(2.0), 1e-12);
}

TEST(TraceNorm, RejectsNonFinite) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(trace_norm(m), DomainError);
}

TEST(TraceNorm, NormAxiomsOnRandomTriples) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 50; ++t) {
        const Matrix a = ginibre(rng, 4, 4), b = ginibre(rng, 4, 4);
        EXPECT_LE(trace_norm(a + b), trace_norm(a) + trace_norm(b) + 1e-9);
        const cplx c(u(rng), u(rng));
        EXPECT_NEAR(trace_norm(c * a), std::abs(c) * trace_norm(a), 1e-9);
        // Non-Hermitian path agrees with the singular value sum.
        Eigen::JacobiSVD<Matrix> svd(a);
        EXPECT_NEAR(trace_norm(a), svd.singularValues().sum(), 1e-9);
    }
}

TEST(Fidelity, Examples) {
    const auto p0 = projector(kQubitA, {1, 0});
    const auto p1 = projector(kQubitA, {0, 1});
    const auto plus = projector(kQubitA, {1, 1});
    EXPECT_NEAR(fidelity(p0, p0), 1.0, 1e-9);
    EXPECT_NEAR(fidelity(p0, p1), 0.0, 1e-12);
    EXPECT_NEAR(fidelity(p0, plus), 0.5, 1e-9);
}

TEST(Fidelity, SymmetricAndMismatchRejected) {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 20; ++t) {
        const auto r = random_density(rng, Layout{{"A", 3}});
        const auto s = random_density(rng, Layout{{"A", 3}}, 2);
        EXPECT_NEAR(fidelity(r, s), fidelity(s, r), 1e-9);
        EXPECT_NEAR(fidelity(r, r), 1.0, 1e-9);
    }
    EXPECT_THROW(fidelity(DensityMatrix::maximally_mixed(kQubitA), DensityMatrix::maximally_mixed(Layout{{"A", 3}})),
                 LayoutError);
}

TEST(Fidelity, FuchsVanDeGraafOnRandomPairs) {
    std::mt19937_64 rng(15);
    std::uniform_int_distribution<int> dim(2, 8), rk(1, 8);
    for (int t = 0; t < 100; ++t) {
        const Layout l{{"S", static_cast<std::size_t>(dim(rng))}};
        const auto r = random_density(rng, l, std::min<int>(rk(rng), static_cast<int>(l.total_dim())));
        const auto s = random_density(rng, l, std::min<int>(rk(rng), static_cast<int>(l.total_dim())));
        const double f = fidelity(r, s);
        const double td = 0.5 * trace_norm(r.matrix() - s.matrix());
        EXPECT_LE(1.0 - std::sqrt(f), td + 1e-9);
        EXPECT_LE(td, std::sqrt(1.0 - f) + 1e-9);
    }
}

TEST(ApplyChannel, IdentityLeavesStateUnchanged) {
    std::mt19937_64 rng(16);
    const auto rho = random_density(rng, Layout{{"A", 2}, {"B", 3}});
    const auto out = apply_channel(QuantumChannel::identity(Layout{{"B", 3}}), rho);
    EXPECT_LE(max_abs(out.matrix() - rho.matrix()), 1e-14);
    EXPECT_EQ(out.layout(), rho.layout());
}

TEST(ApplyChannel, FullyDepolarizingGivesMaximallyMixed) {
    std::mt19937_64 rng(17);
    const auto ch = QuantumChannel::depolarizing(kQubitA, 1.0);
    for (int t = 0; t < 5; ++t) {
        const auto out = apply_channel(ch, random_density(rng, kQubitA));
        EXPECT_LE(max_abs(out.matrix() - Matrix::Identity(2, 2) / 2.0), 1e-12);
    }
}

TEST(ApplyChannel, MatchesSuperoperatorOracle) {
    std::mt19937_64 rng(18);
    const Layout in{{"A", 3}}, out{{"B", 2}};
    const auto ch = random_channel(rng, in, out, 4);
    const Matrix s = superoperator(ch);
    for (int t = 0; t < 10; ++t) {
        const auto rho = random_density(rng, in);
        const auto got = apply_channel(ch, rho);
        EXPECT_LE(max_abs(got.matrix() - apply_superoperator(s, rho.matrix())), 1e-12);
        EXPECT_EQ(got.layout(), out);
    }
}

TEST(ApplyChannel, SubsystemActionMatchesKronecker) {
    std::mt19937_64 rng(19);
    const Layout full{{"X", 2}, {"A", 3}, {"Y", 2}};
    const auto ch = random_channel(rng, Layout{{"A", 3}}, Layout{{"B", 2}}, 3);
    const auto rho = random_density(rng, full);
    const auto got = apply_channel(ch, rho);
    EXPECT_EQ(got.layout().names(), (std::vector<std::string>{"X", "B", "Y"}));
    Matrix want = Matrix::Zero(8, 8);
    for (const auto& k : ch.kraus()) {
        const Matrix big = kron(kron(Matrix::Identity(2, 2), k), Matrix::Identity(2, 2));
        want += big * rho.matrix() * big.adjoint();
    }
    EXPECT_LE(max_abs(got.matrix() - want), 1e-12);
}

TEST(ApplyChannel, MultiSubsystemInputInChannelOrder) {
    std::mt19937_64 rng(20);
    const Layout full{{"A", 2}, {"B", 3}, {"C", 2}};
    // Channel reads (C, A) in that order and outputs one system M.
    const auto ch = random_channel(rng, Layout{{"C", 2}, {"A", 2}}, Layout{{"M", 3}}, 2);
    const auto rho = random_density(rng, full);
    const auto got = apply_channel(ch, rho);
    EXPECT_EQ(got.layout().names(), (std::vector<std::string>{"M", "B"}));
    const auto r = reordered(rho, {"B", "C", "A"});
    Matrix want = Matrix::Zero(9, 9);
    for (const auto& k : ch.kraus()) {
        const Matrix big = kron(Matrix::Identity(3, 3), k);
        want += big * r.matrix() * big.adjoint();
    }
    const Matrix want_mb = reorder(want, Layout{{"B", 3}, {"M", 3}}, {"M", "B"});
    EXPECT_LE(max_abs(got.matrix() - want_mb), 1e-12);
}

TEST(ApplyChannel, LayoutMismatchThrows) {
    const auto ch = QuantumChannel::identity(Layout{{"A", 3}});
    EXPECT_THROW(apply_channel(ch, DensityMatrix::maximally_mixed(kQubitA)), LayoutError);
    EXPECT_THROW(apply_channel(ch, DensityMatrix::maximally_mixed(kQubitB)), LayoutError);
}

TEST(Channel, RejectsNonTracePreserving) {
    EXPECT_THROW(QuantumChannel({Matrix::Identity(2, 2) * 0.5}, kQubitA, kQubitA), DomainError);
    EXPECT_THROW(QuantumChannel({Matrix::Identity(3, 2)}, kQubitA, kQubitA), LayoutError);
}

TEST(Purify, IdentityHasTrivialEnvironment) {
    const auto v = purify_channel(QuantumChannel::identity(kQubitA));
    EXPECT_EQ(v.output_layout().dim_of("env"), 1u);
    EXPECT_LE(max_abs(v.matrix() - Matrix::Identity(2, 2)), 1e-15);
}

TEST(Purify, IsometricChannelIsItself) {
    std::mt19937_64 rng(21);
    const auto ch = random_channel(rng, kQubitA, Layout{{"B", 4}}, 1);
    const auto v = purify_channel(ch);
    EXPECT_EQ(v.output_layout().dim_of("env"), 1u);
    EXPECT_LE(max_abs(v.matrix() - ch.kraus()[0]), 1e-15);
}

TEST(Purify, ReproducesChannelOnRandomInputs) {
    std::mt19937_64 rng(22);
    const std::vector<QuantumChannel> channels = {QuantumChannel::depolarizing(kQubitA, 0.3),
                                                  random_channel(rng, kQubitA, Layout{{"B", 3}}, 9)};
    for (const auto& ch : channels) {
        const auto v = purify_channel(ch);
        EXPECT_LE(v.output_layout().dim_of("env"), ch.input_dim() * ch.output_dim());
        const QuantumChannel vc = QuantumChannel::from_isometry(v);
        for (int t = 0; t < 20; ++t) {
            const auto rho = random_density(rng, kQubitA);
            const auto full = apply_channel(vc, rho);
            const auto reduced = partial_trace(full, ch.output_layout().names());
            EXPECT_LE(max_abs(reduced.matrix() - apply_channel(ch, rho).matrix()), 1e-9);
        }
    }
}

TEST(Complementary, IdentityGivesConstantOneDimensionalEnvironment) {
    const auto c = complementary_channel(QuantumChannel::identity(kQubitA));
    EXPECT_EQ(c.output_dim(), 1u);
    const auto out = apply_channel(c, projector(kQubitA, {1, 1}));
    EXPECT_NEAR(out.matrix()(0, 0).real(), 1.0, 1e-15);
}

TEST(Complementary, DephasingEnvironmentCarriesTheBit) {
    const auto deph = QuantumChannel::dephasing(kQubitA, 1.0);
    const auto c = complementary_channel(deph);
    const auto rho = projector(kQubitA, {std::sqrt(0.3), std::sqrt(0.7)});
    const auto env = apply_channel(c, rho);
    Matrix want = Matrix::Zero(2, 2);
    want(0, 0) = 0.3;
    want(1, 1) = 0.7;
    EXPECT_LE(max_abs(env.matrix() - want), 1e-12);
    // Shared isometry: tracing the original output gives the complement.
    const auto v = QuantumChannel::from_isometry(purify_channel(deph));
    const auto full = apply_channel(v, rho);
    EXPECT_LE(max_abs(partial_trace(full, {"env"}).matrix() - env.matrix()), 1e-12);
}

TEST(Complementary, ComplementOfComplementHasSameChoiSpectrum) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        const auto ch = random_channel(rng, kQubitA, Layout{{"B", 3}}, 1 + t % 4);
        const auto cc = complementary_channel(complementary_channel(ch, "E"), "F");
        const auto a = hermitian_eig(choi_state(ch).matrix()).values;
        const auto b = hermitian_eig(choi_state(cc).matrix()).values;
        ASSERT_EQ(a.size(), b.size());
        EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Choi, IdentityIsMaximallyEntangled) {
    const auto j = choi_state(QuantumChannel::identity(kQubitA));
    const auto phi = DensityMatrix::pure(maximally_entangled("A", "A'", 2));
    EXPECT_LE(max_abs(j.matrix() - phi.matrix()), 1e-15);
    EXPECT_EQ(j.layout().names(), (std::vector<std::string>{"A", "A'"}));
}

TEST(Choi, ConstantChannelIsProduct) {
    std::mt19937_64 rng(24);
    const auto sigma = random_density(rng, Layout{{"B", 3}});
    const auto j = choi_state(QuantumChannel::constant(kQubitA, sigma));
    EXPECT_LE(max_abs(j.matrix() - kron(sigma.matrix(), Matrix(Matrix::Identity(2, 2) / 2.0))), 1e-12);
}

TEST(Choi, ReconstructionIdentity) {
    std::mt19937_64 rng(25);
    const Layout in{{"A", 3}}, out{{"B", 2}};
    const auto ch = random_channel(rng, in, out, 3);
    const Matrix j = choi_state(ch).matrix();
    for (int t = 0; t < 10; ++t) {
        const auto rho = random_density(rng, in);
        // N(rho) = d_in tr_in[J (I (x) rho^T)].
        const Matrix prod = j * kron(Matrix(Matrix::Identity(2, 2)), Matrix(rho.matrix().transpose()));
        Matrix rec = Matrix::Zero(2, 2);
        for (int o = 0; o < 2; ++o)
            for (int o2 = 0; o2 < 2; ++o2)
                for (int i = 0; i < 3; ++i) rec(o, o2) += 3.0 * prod(o * 3 + i, o2 * 3 + i);
        EXPECT_LE(max_abs(rec - apply_channel(ch, rho).matrix()), 1e-12);
    }
    const auto back = channel_from_choi(j, in, out);
    EXPECT_LE(max_abs(choi_state(back).matrix() - j), 1e-12);
}

TEST(Diamond, IdenticalChannelsGiveZero) {
    std::mt19937_64 rng(26);
    const auto ch = random_channel(rng, kQubitA, kQubitB, 2);
    const auto b = diamond_distance_bounds(ch, ch);
    EXPECT_NEAR(b.lower, 0.0, 1e-12);
    EXPECT_NEAR(b.upper, 0.0, 1e-12);
}

TEST(Diamond, IdentityVersusBitFlip) {
    const auto b = diamond_distance_bounds(QuantumChannel::identity(kQubitA), QuantumChannel::unitary(pauli_x(), kQubitA));
    EXPECT_NEAR(b.lower, 2.0, 1e-12);
    EXPECT_NEAR(b.upper, 2.0, 1e-12);
}

TEST(Diamond, IdentityVersusFullDephasing) {
    const auto b = diamond_distance_bounds(QuantumChannel::identity(kQubitA), QuantumChannel::dephasing(kQubitA, 1.0));
    EXPECT_NEAR(b.lower, 1.0, 1e-12);
    EXPECT_LE(b.lower, b.upper);
}

TEST(Diamond, LowerNeverExceedsUpper) {
    std::mt19937_64 rng(27);
    for (int t = 0; t < 20; ++t) {
        const auto a = random_channel(rng, kQubitA, kQubitB, 2);
        const auto b = random_channel(rng, kQubitA, kQubitB, 3);
        const auto d = diamond_distance_bounds(a, b);
        EXPECT_LE(d.lower, d.upper + 1e-15);
        EXPECT_GT(d.lower, 1e-6);
    }
}

TEST(Decoder, IdentityNeedsNoCorrection) {
    const auto id = QuantumChannel::identity(kQubitA);
    const auto r = find_best_decoder(id, id);
    EXPECT_LE(r.achieved_error, 1e-9);
}

TEST(Decoder, InvertsUnitary) {
    std::mt19937_64 rng(28);
    const Matrix u = random_unitary(rng, 2);
    const auto r = find_best_decoder(QuantumChannel::unitary(u, kQubitA), QuantumChannel::identity(kQubitA));
    EXPECT_LE(r.achieved_error, 1e-8);
    EXPECT_NEAR(r.overlap, 1.0, 1e-9);
}

TEST(Decoder, RecoversFromIsometricEmbedding) {
    std::mt19937_64 rng(29);
    const auto ch = random_channel(rng, kQubitA, Layout{{"B", 5}}, 1);
    const auto r = find_best_decoder(ch, QuantumChannel::identity(kQubitA));
    EXPECT_LE(r.achieved_error, 1e-8);
}

TEST(Decoder, NoisyChannelGivesValidDecoderAndBoundedError) {
    const auto dep = QuantumChannel::depolarizing(kQubitA, 0.2);
    const auto r = find_best_decoder(dep, QuantumChannel::identity(kQubitA));
    // The identity decoder is optimal here: overlap 1 - 3p/4.
    EXPECT_NEAR(r.overlap, 1.0 - 0.15, 1e-6);
    EXPECT_NEAR(r.achieved_error, trace_norm(choi_state(dep).matrix() - choi_state(QuantumChannel::identity(kQubitA)).matrix()),
                1e-6);
}

TEST(Ensemble, SingleElementEquality) {
    const auto p = projector(kQubitA, {1, 2});
    const auto r = ensemble_sqrt_fidelity_check({{1.0, p}}, {p});
    EXPECT_NEAR(r.max_lhs, 1.0, 1e-9);
    EXPECT_NEAR(r.rhs, 1.0, 1e-9);
}

TEST(Ensemble, OrthogonalPair) {
    const auto p0 = projector(kQubitA, {1, 0});
    const auto p1 = projector(kQubitA, {0, 1});
    const auto mid = DensityMatrix::maximally_mixed(kQubitA);
    const auto r = ensemble_sqrt_fidelity_check({{0.5, p0}, {0.5, p1}}, {p0, p1, mid});
    // rhs^2 = 1/4 + 1/4 with vanishing cross terms.
    EXPECT_NEAR(r.rhs, std::sqrt(0.5), 1e-12);
    EXPECT_LE(r.max_lhs, r.rhs + 1e-9);
    EXPECT_NEAR(r.max_lhs, std::sqrt(0.5), 1e-9);
}

TEST(Ensemble, RandomQubitEnsemblesSatisfyBound) {
    std::mt19937_64 rng(30);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const int m = 2 + t % 3;
        std::vector<std::pair<double, DensityMatrix>> ens;
        std::vector<double> w(m);
        double total = 0.0;
        for (auto& x : w) total += (x = u(rng) + 1e-3);
        std::vector<DensityMatrix> cands;
        for (int i = 0; i < m; ++i) {
            ens.emplace_back(w[i] / total, random_density(rng, kQubitA, 1 + i % 2));
            cands.push_back(ens.back().second);
        }
        for (int c = 0; c < 5; ++c) cands.push_back(random_density(rng, kQubitA));
        cands.push_back(DensityMatrix::maximally_mixed(kQubitA));
        const auto r = ensemble_sqrt_fidelity_check(ens, cands);
        EXPECT_LE(r.max_lhs, r.rhs + 1e-9);
    }
    EXPECT_THROW(ensemble_sqrt_fidelity_check({}, {}), DomainError);
}

TEST(MatrixIo, RoundTripIsExact) {
    std::mt19937_64 rng(31);
    const auto rho = random_density(rng, Layout{{"A", 2}, {"B", 3}});
    std::stringstream ss;
    write_density(ss, rho);
    EXPECT_EQ(ss.str().rfind("dims: 2 3\n", 0), 0u);
    const auto back = read_density(ss);
    EXPECT_EQ(back.layout()[1].dim, 3u);
    EXPECT_EQ(max_abs(back.matrix() - rho.matrix()), 0.0);
}

TEST(MatrixIo, MalformedInputReportsLine) {
    std::stringstream bad("dims: 2\n1,0 0,0\n0,0 x,1\n");
    try {
        read_matrix(bad);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    std::stringstream short_input("dims: 2\n1,0 0,0\n");
    EXPECT_THROW(read_matrix(short_input), FormatError);
    std::stringstream no_header("2 2\n");
    EXPECT_THROW(read_matrix(no_header), FormatError);
}
