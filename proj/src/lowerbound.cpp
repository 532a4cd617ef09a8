#include "cdslab/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cdslab/decoder.hpp"
#include "cdslab/error.hpp"
#include "cdslab/measures.hpp"

namespace cdslab {

namespace {

using Idx = Eigen::Index;

double log2_dim(std::size_t d) { return std::log2(static_cast<double>(d)); }

std::size_t dims_of(const Layout& l, const std::vector<std::string>& names) { return l.select(names).total_dim(); }

// Maximally entangled vector on (Qbar, secret), index qbar * d + q.
Vector phi_plus(std::size_t d) {
    Vector v = Vector::Zero(static_cast<Idx>(d * d));
    for (std::size_t i = 0; i < d; ++i) v(static_cast<Idx>(i * d + i)) = 1.0 / std::sqrt(static_cast<double>(d));
    return v;
}

// Orthonormal basis of the column space of z, from the smaller Gram matrix.
Matrix column_basis(const Matrix& z) {
    if (z.rows() <= z.cols()) {
        const auto e = hermitian_eig(z * z.adjoint());
        const double top = std::max(e.values.maxCoeff(), 0.0);
        std::vector<Idx> keep;
        for (Idx j = e.values.size() - 1; j >= 0; --j)
            if (e.values(j) > 1e-12 * top && top > 0.0) keep.push_back(j);
        Matrix b(z.rows(), static_cast<Idx>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i) b.col(static_cast<Idx>(i)) = e.vectors.col(keep[i]);
        return b;
    }
    const auto e = hermitian_eig(z.adjoint() * z);
    const double top = std::max(e.values.maxCoeff(), 0.0);
    std::vector<Idx> keep;
    for (Idx j = e.values.size() - 1; j >= 0; --j)
        if (e.values(j) > 1e-12 * top && top > 0.0) keep.push_back(j);
    Matrix b(z.rows(), static_cast<Idx>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        Vector u = z * e.vectors.col(keep[i]);
        b.col(static_cast<Idx>(i)) = u / u.norm();
    }
    // Re-orthonormalize against rounding.
    Eigen::HouseholderQR<Matrix> qr(b);
    return qr.householderQ() * Matrix::Identity(b.rows(), b.cols());
}

// psi^s restricted to the joint supports on M and M'.
std::vector<Matrix> reduce_to_supports(const std::vector<Matrix>& psi) {
    const Idx dm = psi[0].rows();
    const Idx dmp = psi[0].cols();
    const Idx n = static_cast<Idx>(psi.size());
    Matrix cols(dm, dmp * n);
    Matrix rows(dmp, dm * n);
    for (Idx s = 0; s < n; ++s) {
        cols.block(0, s * dmp, dm, dmp) = psi[static_cast<std::size_t>(s)];
        rows.block(0, s * dm, dmp, dm) = psi[static_cast<std::size_t>(s)].transpose();
    }
    const Matrix bm = column_basis(cols);
    const Matrix bmp = column_basis(rows);
    std::vector<Matrix> out;
    for (const auto& p : psi) out.push_back(bm.adjoint() * p * bmp.conjugate());
    return out;
}

std::vector<Matrix> tensor_power_family(const std::vector<Matrix>& base, int k) {
    std::vector<Matrix> fam = base;
    for (int i = 1; i < k; ++i) {
        std::vector<Matrix> next;
        for (const auto& a : fam)
            for (const auto& b : base) next.push_back(kron(a, b));
        fam = std::move(next);
    }
    return fam;
}

Matrix reduced_m_prime(const Matrix& psi) { return psi.transpose() * psi.conjugate(); }

struct SeesawOutcome {
    double value = 0.0;
    Matrix phi;
    int rounds = 0;
    bool converged = false;
};

// max over unit Phi (r x b) and isometries W_s (a x r) of
// (1/D) sum_s |tr(W_s Phi Psi_s^dagger)|^2.
SeesawOutcome seesaw(const std::vector<Matrix>& psi, const CheatOptions& opt, std::mt19937_64& rng,
                     const Matrix* start = nullptr) {
    const Idx a = psi[0].rows();
    const Idx b = psi[0].cols();
    const Idx r = std::min(a, b);
    const double dn = static_cast<double>(psi.size());
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix phi(r, b);
    if (start != nullptr && start->rows() == r && start->cols() == b) {
        phi = *start;
    } else {
        for (Idx i = 0; i < r; ++i)
            for (Idx j = 0; j < b; ++j) phi(i, j) = cplx(g(rng), g(rng));
    }
    phi /= phi.norm();

    SeesawOutcome out;
    double last = -1.0;
    std::vector<Matrix> w(psi.size());
    for (int round = 1; round <= opt.max_rounds; ++round) {
        double value = 0.0;
        for (std::size_t s = 0; s < psi.size(); ++s) {
            // Polar part of C = Phi Psi_s^dagger through the eigenbasis of C C^dagger.
            const Matrix c = phi * psi[s].adjoint();
            const auto e = hermitian_eig(c * c.adjoint());
            const double top = std::max(e.values.maxCoeff(), 0.0);
            Matrix inv_sqrt = Matrix::Zero(r, r);
            double t = 0.0;
            for (Idx j = 0; j < r; ++j) {
                if (e.values(j) <= 1e-14 * top || top <= 0.0) continue;
                const double sv = std::sqrt(e.values(j));
                t += sv;
                inv_sqrt += e.vectors.col(j) * e.vectors.col(j).adjoint() / sv;
            }
            w[s] = c.adjoint() * inv_sqrt;
            value += t * t;
        }
        value /= dn;
        if (value >= out.value) {
            out.value = value;
            out.phi = phi;
        }
        out.rounds = round;
        if (value - last < opt.min_improvement) {
            out.converged = true;
            break;
        }
        last = value;
        std::vector<Matrix> xs;
        Matrix gram(static_cast<Idx>(psi.size()), static_cast<Idx>(psi.size()));
        for (std::size_t s = 0; s < psi.size(); ++s) xs.push_back(w[s].adjoint() * psi[s]);
        for (std::size_t s = 0; s < psi.size(); ++s)
            for (std::size_t t = 0; t < psi.size(); ++t)
                gram(static_cast<Idx>(s), static_cast<Idx>(t)) = (xs[s].conjugate().cwiseProduct(xs[t])).sum();
        const auto e = hermitian_eig(gram);
        const Vector top = e.vectors.col(e.values.size() - 1);
        Matrix next = Matrix::Zero(r, b);
        for (std::size_t t = 0; t < psi.size(); ++t) next += top(static_cast<Idx>(t)) * xs[t];
        const double nrm = next.norm();
        if (nrm < 1e-300) break;
        phi = next / nrm;
    }
    return out;
}

constexpr std::size_t kCheatBudget = std::size_t{1} << 22;

void require_value(const PromiseFunction& f, u64 x, u64 y, FValue want, const char* what) {
    if (f(x, y) != want) {
        throw DomainError(std::string(what) + " needs an input with f(x,y) = " + (want == FValue::one ? "1" : "0"));
    }
}

}  // namespace

double gamma_threshold(double epsilon, double delta, std::size_t d_q) {
    if (!(epsilon >= 0.0 && epsilon < 1.0) || !(delta >= 0.0 && delta < 1.0)) {
        throw DomainError("epsilon and delta must lie in [0,1)");
    }
    if (d_q < 2) throw DomainError("secret dimension must be at least 2");
    const double g = 0.5 * (1.0 - 1.0 / std::sqrt(static_cast<double>(d_q))) - epsilon / 4.0 - delta / 4.0;
    if (g <= 0.0) throw DomainError("gamma is not positive for these errors");
    return g;
}

int required_digits(double q_b, double e, double gamma) {
    if (gamma <= 0.0) throw DomainError("gamma must be positive");
    const double k = 1.5 * (q_b + e) - std::log2(gamma);
    return static_cast<int>(std::ceil(k - 1e-12));
}

Matrix QuantizedState::matrix() const {
    const Idx d = static_cast<Idx>(dim());
    const double scale = std::ldexp(1.0, -digits);
    Matrix m(d, d);
    for (Idx i = 0; i < d; ++i)
        for (Idx j = 0; j < d; ++j) {
            const std::size_t at = static_cast<std::size_t>(i * d + j);
            m(i, j) = cplx(static_cast<double>(re[at]) * scale, static_cast<double>(im[at]) * scale);
        }
    return m;
}

QuantizationReport quantize_state(const DensityMatrix& rho, int k) {
    if (k < 1 || k > 52) throw DomainError("quantization digits must lie in [1, 52]");
    QuantizationReport rep;
    QuantizedState& q = rep.state;
    q.digits = k;
    q.layout = rho.layout();
    const Idx d = static_cast<Idx>(rho.dim());
    const double scale = std::ldexp(1.0, k);
    q.re.resize(static_cast<std::size_t>(d * d));
    q.im.resize(static_cast<std::size_t>(d * d));
    for (Idx i = 0; i < d; ++i)
        for (Idx j = 0; j < d; ++j) {
            const std::size_t at = static_cast<std::size_t>(i * d + j);
            q.re[at] = std::llround(rho.matrix()(i, j).real() * scale);
            q.im[at] = std::llround(rho.matrix()(i, j).imag() * scale);
        }
    const Matrix diff = q.matrix() - rho.matrix();
    for (Idx i = 0; i < d; ++i)
        for (Idx j = 0; j < d; ++j) {
            rep.max_component_error = std::max(
                {rep.max_component_error, std::abs(diff(i, j).real()), std::abs(diff(i, j).imag())});
        }
    const double dd = static_cast<double>(d);
    rep.frobenius_error = diff.norm();
    rep.trace_error = trace_norm(0.5 * (diff + diff.adjoint()));
    rep.frobenius_bound = dd / scale;
    rep.trace_bound = std::pow(dd, 1.5) / scale;
    rep.chain_holds = rep.max_component_error < 1.0 / scale &&
                      rep.trace_error <= std::sqrt(dd) * rep.frobenius_error * (1.0 + 1e-12) + 1e-15 &&
                      std::sqrt(dd) * rep.frobenius_error <= rep.trace_bound;
    return rep;
}

DensityMatrix bob_side_state(const CdqsProtocol& p, u64 y) {
    const QuantumChannel b = with_input_order(p.bob(y), p.bob_resource());
    const DensityMatrix out = apply_channel(b, DensityMatrix::pure(p.resource));
    std::vector<std::string> order = p.alice_resource;
    for (const auto& n : p.bob_output.names()) order.push_back(n);
    return reordered(out, order);
}

OneWayParameters one_way_parameters(const CdqsProtocol& p, double epsilon, double delta) {
    OneWayParameters o;
    o.epsilon = epsilon;
    o.delta = delta;
    const double g = gamma_threshold(epsilon, delta, p.d_q());
    o.digits = required_digits(log2_dim(p.bob_output.total_dim()),
                               log2_dim(dims_of(p.resource.layout(), p.alice_resource)), g);
    return o;
}

OneWayDecision one_way_decide(const CdqsProtocol& p, u64 x, u64 y, const OneWayParameters& params) {
    OneWayDecision d;
    const std::size_t dq = p.d_q();
    d.gamma = gamma_threshold(params.epsilon, params.delta, dq);
    const int needed = required_digits(log2_dim(p.bob_output.total_dim()),
                                       log2_dim(dims_of(p.resource.layout(), p.alice_resource)), d.gamma);
    if (params.digits < needed) {
        throw DomainError("one-way description needs at least " + std::to_string(needed) + " digits");
    }
    d.digits = params.digits;
    d.threshold = (1.0 - 1.0 / std::sqrt(static_cast<double>(dq))) + (params.delta - params.epsilon) / 2.0;

    const DensityMatrix rho = bob_side_state(p, y);
    d.quantization = quantize_state(rho, params.digits);

    std::vector<std::string> in_order = p.secret.names();
    for (const auto& n : p.alice_resource) in_order.push_back(n);
    const QuantumChannel a = with_input_order(p.alice(x), in_order);
    const Vector phi = phi_plus(dq);
    const Layout ref_layout = Layout{{kReferenceName, dq}}.concat(p.secret);
    std::vector<std::string> out_order{kReferenceName};
    for (const auto& n : p.message_layout().names()) out_order.push_back(n);

    auto distance_for = [&](const Matrix& lmb) {
        const Matrix omega = kron(phi * phi.adjoint(), lmb);
        Layout out_layout;
        const Matrix out = apply_channel_to_operator(a, omega, ref_layout.concat(rho.layout()), &out_layout);
        const Matrix ordered = reorder(out, out_layout, out_order);
        const Layout ol = out_layout.select(out_order);
        const Matrix rho_m = trace_out(ordered, ol, p.message_layout().names());
        const Idx dqi = static_cast<Idx>(dq);
        const Matrix prod = kron(Matrix::Identity(dqi, dqi) / static_cast<double>(dq), rho_m);
        const Matrix diff = ordered - prod;
        return blockwise_trace_norm(0.5 * (diff + diff.adjoint()), ol, p.classical_registers);
    };
    d.distance = distance_for(d.quantization.state.matrix());
    d.exact_distance = distance_for(rho.matrix());
    d.value = d.distance > d.threshold ? 1 : 0;
    return d;
}

TwoProverProof build_two_prover_proof(const CdqsProtocol& p, int k) {
    if (k < 1) throw DomainError("the proof needs at least one secret copy");
    if (!p.components.empty()) throw DomainError("build the proof from an unrepeated protocol");
    if (k > 8) throw BudgetError("the proof supports at most 8 secret copies");
    TwoProverProof tp;
    tp.source = p;
    tp.k = k;
    tp.secret_qubits = k * static_cast<int>(std::lround(log2_dim(p.d_q())));
    tp.verifier_test =
        "Alice sends s to prover 1; provers send M to Alice/Bob and M' to Alice/Bob; Alice and Bob undo the "
        "purifications U^x, U^y; Bob sends R to Alice; accept iff the ancillas read 0, LR is the resource "
        "state and Q reads s";
    return tp;
}

CopyPurification purify_copy(const TwoProverProof& tp, u64 x, u64 y) {
    const CdqsProtocol& p = tp.source;
    std::vector<std::string> in_order = p.secret.names();
    for (const auto& n : p.alice_resource) in_order.push_back(n);
    const auto bob_res = p.bob_resource();
    CopyPurification cp{purify_channel(with_input_order(p.alice(x), in_order), "MA'"),
                        purify_channel(with_input_order(p.bob(y), bob_res), "MB'"),
                        {},
                        p.message_layout(),
                        {},
                        0, 0, 0, 0, 0, 0, 0};
    cp.d_ma = p.alice_output.total_dim();
    cp.d_mb = p.bob_output.total_dim();
    cp.d_ma_prime = cp.alice.output_layout().dim_of("MA'");
    cp.d_mb_prime = cp.bob.output_layout().dim_of("MB'");
    cp.d_q = p.d_q();
    cp.d_l = dims_of(p.resource.layout(), p.alice_resource);
    cp.d_r = dims_of(p.resource.layout(), bob_res);
    cp.m_prime_layout = Layout{{"MA'", cp.d_ma_prime}, {"MB'", cp.d_mb_prime}};
    std::vector<std::string> order = p.message_layout().names();
    order.push_back("MA'");
    order.push_back("MB'");
    const Idx dm = static_cast<Idx>(cp.d_ma * cp.d_mb);
    const Idx dmp = static_cast<Idx>(cp.d_ma_prime * cp.d_mb_prime);
    for (std::size_t s = 0; s < cp.d_q; ++s) {
        StateVector st = tensor(StateVector::basis(p.secret, s), p.resource);
        st = apply_isometry(cp.bob, apply_isometry(cp.alice, st));
        const Vector v = reorder(st.amplitudes(), st.layout(), order);
        Matrix m(dm, dmp);
        for (Idx i = 0; i < dm; ++i)
            for (Idx j = 0; j < dmp; ++j) m(i, j) = v(i * dmp + j);
        cp.psi.push_back(std::move(m));
    }
    return cp;
}

ProofCost proof_cost(const TwoProverProof& tp, u64 x, u64 y) {
    const CopyPurification cp = purify_copy(tp, x, y);
    const double k = static_cast<double>(tp.k);
    ProofCost c;
    c.communication = k * (log2_dim(cp.d_ma * cp.d_ma_prime * cp.d_mb * cp.d_mb_prime) + log2_dim(cp.d_r));
    c.chain = k * (2.0 * log2_dim(cp.d_ma) + 2.0 * log2_dim(cp.d_mb) + log2_dim(cp.d_q) + log2_dim(cp.d_l) +
                   2.0 * log2_dim(cp.d_r));
    const double e = log2_dim(cp.d_l);
    c.bound = 2.0 * k * (2.0 * e + log2_dim(cp.d_ma) + log2_dim(cp.d_mb)) + tp.secret_qubits;
    c.environment_bounds_hold =
        cp.d_ma_prime <= cp.d_q * cp.d_l * cp.d_ma && cp.d_mb_prime <= cp.d_r * cp.d_mb;
    return c;
}

HonestAcceptance honest_acceptance(const TwoProverProof& tp, const PromiseFunction& f, u64 x, u64 y) {
    require_value(f, x, y, FValue::one, "honest acceptance");
    const CdqsProtocol& p = tp.source;
    const CopyPurification cp = purify_copy(tp, x, y);
    const auto dec = p.decoder(x, y);
    if (!dec) throw DomainError(p.name + ": no decoder for a value-one input");
    const Isometry v = purify_channel(with_input_order(*dec, p.message_layout().names()), "P");
    const Idx dq = static_cast<Idx>(cp.d_q);
    const Idx dp = static_cast<Idx>(v.output_layout().dim_of("P"));
    if (static_cast<Idx>(v.output_layout().total_dim()) != dq * dp) {
        throw LayoutError("decoder output does not match the secret");
    }
    // eta_s: the P M' block of (V (x) I) psi^s with the recovered register reading s.
    std::vector<Matrix> eta;
    for (Idx s = 0; s < dq; ++s) {
        const Matrix full = v.matrix() * cp.psi[static_cast<std::size_t>(s)];
        eta.push_back(full.block(s * dp, 0, dp, full.cols()));
    }
    Matrix phi = Matrix::Zero(dp, eta[0].cols());
    for (const auto& e : eta) phi += e;
    const double nrm = phi.norm();
    if (nrm < 1e-12) throw DomainError("forward run leaves no overlap with the entangled secret");
    phi /= nrm;
    std::vector<double> acc;
    for (const auto& e : eta) acc.push_back(std::norm((e.conjugate().cwiseProduct(phi)).sum()));
    double mean = 0.0;
    for (double a : acc) mean += a;
    mean /= static_cast<double>(acc.size());
    HonestAcceptance h;
    h.mean = std::pow(mean, tp.k);
    h.min = std::pow(*std::min_element(acc.begin(), acc.end()), tp.k);
    h.max = std::pow(*std::max_element(acc.begin(), acc.end()), tp.k);
    return h;
}

double message_orthogonality_check(const TwoProverProof& tp, const PromiseFunction& f, u64 x, u64 y) {
    require_value(f, x, y, FValue::zero, "orthogonality check");
    const CopyPurification cp = purify_copy(tp, x, y);
    const auto reduced = reduce_to_supports(cp.psi);
    const std::size_t d = reduced.size();
    std::vector<std::vector<double>> fid(d, std::vector<double>(d, 1.0));
    for (std::size_t s = 0; s < d; ++s)
        for (std::size_t t = s + 1; t < d; ++t) {
            fid[s][t] = fid[t][s] = fidelity(reduced_m_prime(reduced[s]), reduced_m_prime(reduced[t]));
        }
    // Fidelity is multiplicative over the copies.
    std::size_t total = 1;
    for (int i = 0; i < tp.k; ++i) total *= d;
    double worst = 0.0;
    for (std::size_t s = 0; s < total; ++s)
        for (std::size_t t = s + 1; t < total; ++t) {
            double prod = 1.0;
            std::size_t a = s, b = t;
            for (int i = 0; i < tp.k; ++i) {
                prod *= fid[a % d][b % d];
                a /= d;
                b /= d;
            }
            worst = std::max(worst, prod);
        }
    return worst;
}

CheatResult cheat_optimize(const TwoProverProof& tp, const PromiseFunction& f, u64 x, u64 y,
                           const CheatOptions& options) {
    require_value(f, x, y, FValue::zero, "cheating search");
    const CopyPurification cp = purify_copy(tp, x, y);
    const auto base = reduce_to_supports(cp.psi);
    std::size_t a = 1, b = 1, d = 1;
    for (int i = 0; i < tp.k; ++i) {
        a *= static_cast<std::size_t>(base[0].rows());
        b *= static_cast<std::size_t>(base[0].cols());
        d *= base.size();
    }
    CheatResult res;
    res.m_support = a;
    res.m_prime_support = b;
    res.product_restricted = a * b * d > kCheatBudget;

    std::mt19937_64 rng(options.seed);
    SeesawOutcome single;
    for (int r = 0; r < std::max(1, options.restarts); ++r) {
        SeesawOutcome o = seesaw(base, options, rng);
        if (r == 0 || o.value > single.value) single = std::move(o);
    }
    double abl = 0.0;
    for (const auto& psi : base) abl += seesaw({psi}, options, rng).value;
    // Without the constraint each s gets its own shared state.
    res.ablation_p_pass = std::pow(abl / static_cast<double>(base.size()), tp.k);

    if (res.product_restricted || tp.k == 1) {
        res.p_pass = std::pow(single.value, tp.k);
        res.rounds = single.rounds;
        res.converged = single.converged;
        return res;
    }
    const auto family = tensor_power_family(base, tp.k);
    Matrix start = single.phi;
    for (int i = 1; i < tp.k; ++i) start = kron(start, single.phi);
    // The joint search starts from the best product strategy plus one random start.
    for (int r = 0; r < std::min(2, std::max(1, options.restarts)); ++r) {
        const SeesawOutcome o = seesaw(family, options, rng, r == 0 ? &start : nullptr);
        if (r == 0 || o.value > res.p_pass) {
            res.p_pass = o.value;
            res.rounds = o.rounds;
            res.converged = o.converged;
        }
    }
    return res;
}

double soundness_bound(int k, double delta) {
    if (k < 1) throw DomainError("k must be at least 1");
    return std::sqrt(std::ldexp(1.0, -k) + delta * std::pow(2.0, -static_cast<double>(k) / 4.0));
}

double fidelity_chain_bound(std::size_t d_q, double delta) {
    return std::sqrt(1.0 / static_cast<double>(d_q) + 2.0 * std::pow(std::max(delta, 0.0), 0.25));
}

ComplementaryDecode complementary_decode_check(const CdqsProtocol& p, const PromiseFunction& f, u64 x, u64 y) {
    require_value(f, x, y, FValue::zero, "complementary decoding");
    const QuantumChannel n = effective_channel(p, x, y);
    const QuantumChannel nc = complementary_channel(n, "env");
    const DecoderResult r = find_best_decoder(nc, QuantumChannel::identity(p.secret));
    return {r.achieved_error, r.rounds, r.converged};
}

}  // namespace cdslab
